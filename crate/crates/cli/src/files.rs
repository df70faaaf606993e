//! JSON file formats for channels and strategies.
//!
//! A channel document has members `alphabets` (cardinalities of W, X, Y1,
//! Y2), `state` (the |W| probabilities of p(w)), `kernel` (nested arrays
//! indexed `[w][x][y1][y2]`), and an optional boolean
//! `kernel_ignores_state` (default false).
//!
//! A strategy document has members `class` (1 or 2), `cardinalities`
//! ({U, V1, V2}; U defaults to 1), `u` (the |U| probabilities of p(u),
//! class 2 only), `aux` (`[w][v1][v2]` for class 1, `[w][u][v1][v2]` for
//! class 2), and `input` (`[w][v1][v2][x]`). The W and X cardinalities are
//! implied by the array shapes.
//!
//! Parsing collects every violation (shape, negativity, normalization at
//! 1e-9) with its index path before failing, so a bad file produces one
//! complete diagnostic. Tables are renormalized exactly after validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use bcregions::channel::{
    factor_violations, StateBroadcastChannel, Strategy, StrategyClass1, StrategyClass2, Violation,
};
use bcregions::prob::{Factor, VariableSpec};
use bcregions::INPUT_NORM_TOL;

#[derive(Debug)]
pub enum FileError {
    Io {
        path: String,
        message: String,
    },
    Schema {
        path: String,
        message: String,
    },
    Invalid {
        path: String,
        violations: Vec<Violation>,
    },
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Io { path, message } => write!(f, "{path}: {message}"),
            FileError::Schema { path, message } => write!(f, "{path}: schema error: {message}"),
            FileError::Invalid { path, violations } => {
                write!(f, "{path}: invalid document")?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for FileError {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabets {
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "X")]
    pub x: usize,
    #[serde(rename = "Y1")]
    pub y1: usize,
    #[serde(rename = "Y2")]
    pub y2: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub alphabets: Alphabets,
    pub state: Vec<f64>,
    /// Indexed `[w][x][y1][y2]`.
    pub kernel: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub kernel_ignores_state: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cardinalities {
    #[serde(rename = "U", default = "one")]
    pub u: usize,
    #[serde(rename = "V1")]
    pub v1: usize,
    #[serde(rename = "V2")]
    pub v2: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub class: u8,
    pub cardinalities: Cardinalities,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    /// `[w][v1][v2]` for class 1, `[w][u][v1][v2]` for class 2.
    pub aux: serde_json::Value,
    /// `[w][v1][v2][x]`.
    pub input: Vec<Vec<Vec<Vec<f64>>>>,
}

fn read_to_string(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|e| FileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_channel(path: &Path) -> Result<StateBroadcastChannel, FileError> {
    let text = read_to_string(path)?;
    parse_channel(&text, &path.display().to_string())
}

pub fn parse_channel(text: &str, origin: &str) -> Result<StateBroadcastChannel, FileError> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| FileError::Schema {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    channel_from_file(&file).map_err(|violations| FileError::Invalid {
        path: origin.to_string(),
        violations,
    })
}

fn card_violation(path: String, expected: usize, got: usize) -> Violation {
    Violation {
        path,
        message: format!("expected {expected} entries, found {got}"),
    }
}

pub fn channel_from_file(file: &ChannelFile) -> Result<StateBroadcastChannel, Vec<Violation>> {
    let a = &file.alphabets;
    let mut violations = Vec::new();
    for (name, value) in [("W", a.w), ("X", a.x), ("Y1", a.y1), ("Y2", a.y2)] {
        if value == 0 {
            violations.push(Violation {
                path: format!("alphabets.{name}"),
                message: "cardinality must be >= 1".into(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    if file.state.len() != a.w {
        violations.push(card_violation("state".into(), a.w, file.state.len()));
    }
    if file.kernel.len() != a.w {
        violations.push(card_violation("kernel".into(), a.w, file.kernel.len()));
    }
    let mut flat = Vec::with_capacity(a.w * a.x * a.y1 * a.y2);
    for (w, per_x) in file.kernel.iter().enumerate() {
        if per_x.len() != a.x {
            violations.push(card_violation(format!("kernel[w={w}]"), a.x, per_x.len()));
            continue;
        }
        for (x, per_y1) in per_x.iter().enumerate() {
            if per_y1.len() != a.y1 {
                violations.push(card_violation(
                    format!("kernel[w={w}][x={x}]"),
                    a.y1,
                    per_y1.len(),
                ));
                continue;
            }
            for (y1, per_y2) in per_y1.iter().enumerate() {
                if per_y2.len() != a.y2 {
                    violations.push(card_violation(
                        format!("kernel[w={w}][x={x}][y1={y1}]"),
                        a.y2,
                        per_y2.len(),
                    ));
                    continue;
                }
                flat.extend_from_slice(per_y2);
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let spec = |name: &str, card: usize| VariableSpec::new(name, card).expect("valid spec");
    let state = Factor::unconditioned(vec![spec("W", a.w)], file.state.clone())
        .map_err(|e| vec![Violation { path: "state".into(), message: e.to_string() }])?;
    let kernel = Factor::new(
        vec![spec("Y1", a.y1), spec("Y2", a.y2)],
        vec![spec("W", a.w), spec("X", a.x)],
        flat,
    )
    .map_err(|e| vec![Violation { path: "kernel".into(), message: e.to_string() }])?;

    violations.extend(factor_violations(&state, "state", INPUT_NORM_TOL));
    violations.extend(factor_violations(&kernel, "kernel", INPUT_NORM_TOL));
    if !violations.is_empty() {
        return Err(violations);
    }

    let channel = StateBroadcastChannel::new(state.normalized(), kernel.normalized())
        .expect("factors carry the canonical roles")
        .with_kernel_ignoring_state(file.kernel_ignores_state);
    Ok(channel)
}

pub fn load_strategy(path: &Path) -> Result<Strategy, FileError> {
    let text = read_to_string(path)?;
    parse_strategy(&text, &path.display().to_string())
}

pub fn parse_strategy(text: &str, origin: &str) -> Result<Strategy, FileError> {
    let file: StrategyFile = serde_json::from_str(text).map_err(|e| FileError::Schema {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    strategy_from_file(&file).map_err(|violations| FileError::Invalid {
        path: origin.to_string(),
        violations,
    })
}

/// Walks a nested JSON array of the given dimensions, collecting shape
/// violations by index path and flattening row-major.
fn walk_array(
    value: &serde_json::Value,
    dims: &[(String, usize)],
    path: &str,
    flat: &mut Vec<f64>,
    violations: &mut Vec<Violation>,
) {
    match dims.split_first() {
        None => match value.as_f64() {
            Some(x) => flat.push(x),
            None => violations.push(Violation {
                path: path.to_string(),
                message: "expected a number".into(),
            }),
        },
        Some(((axis, card), rest)) => {
            let Some(items) = value.as_array() else {
                violations.push(Violation {
                    path: path.to_string(),
                    message: format!("expected an array over {axis}"),
                });
                return;
            };
            if items.len() != *card {
                violations.push(card_violation(path.to_string(), *card, items.len()));
                return;
            }
            for (i, item) in items.iter().enumerate() {
                walk_array(item, rest, &format!("{path}[{axis}={i}]"), flat, violations);
            }
        }
    }
}

fn dims(parts: &[(&str, usize)]) -> Vec<(String, usize)> {
    parts.iter().map(|(n, c)| (n.to_string(), *c)).collect()
}

pub fn strategy_from_file(file: &StrategyFile) -> Result<Strategy, Vec<Violation>> {
    let mut violations = Vec::new();
    let cards = &file.cardinalities;
    if file.class != 1 && file.class != 2 {
        return Err(vec![Violation {
            path: "class".into(),
            message: format!("class must be 1 or 2, found {}", file.class),
        }]);
    }
    for (name, value) in [("U", cards.u), ("V1", cards.v1), ("V2", cards.v2)] {
        if value == 0 {
            violations.push(Violation {
                path: format!("cardinalities.{name}"),
                message: "cardinality must be >= 1".into(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    // The W and X cardinalities are implied by the array shapes.
    let w = match file.aux.as_array() {
        Some(items) if !items.is_empty() => items.len(),
        _ => {
            return Err(vec![Violation {
                path: "aux".into(),
                message: "expected a nonempty array over w".into(),
            }])
        }
    };
    let x = file
        .input
        .first()
        .and_then(|a| a.first())
        .and_then(|a| a.first())
        .map(|a| a.len())
        .unwrap_or(0);
    if x == 0 {
        return Err(vec![Violation {
            path: "input".into(),
            message: "could not infer the X cardinality from the input table".into(),
        }]);
    }

    let aux_dims = if file.class == 1 {
        dims(&[("w", w), ("v1", cards.v1), ("v2", cards.v2)])
    } else {
        dims(&[("w", w), ("u", cards.u), ("v1", cards.v1), ("v2", cards.v2)])
    };
    let mut aux_flat = Vec::new();
    walk_array(&file.aux, &aux_dims, "aux", &mut aux_flat, &mut violations);

    let input_value = serde_json::to_value(&file.input).expect("already parsed");
    let input_dims = dims(&[("w", w), ("v1", cards.v1), ("v2", cards.v2), ("x", x)]);
    let mut input_flat = Vec::new();
    walk_array(
        &input_value,
        &input_dims,
        "input",
        &mut input_flat,
        &mut violations,
    );

    match (file.class, &file.u) {
        (1, Some(_)) => violations.push(Violation {
            path: "u".into(),
            message: "class 1 strategies carry no u table".into(),
        }),
        (2, None) => violations.push(Violation {
            path: "u".into(),
            message: "class 2 strategies require a u table".into(),
        }),
        (2, Some(u)) if u.len() != cards.u => {
            violations.push(card_violation("u".into(), cards.u, u.len()));
        }
        _ => {}
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let spec = |name: &str, card: usize| VariableSpec::new(name, card).expect("valid spec");
    let given_aux = if file.class == 1 {
        vec![spec("W", w)]
    } else {
        vec![spec("W", w), spec("U", cards.u)]
    };
    let aux = Factor::new(
        vec![spec("V1", cards.v1), spec("V2", cards.v2)],
        given_aux,
        aux_flat,
    )
    .map_err(|e| vec![Violation { path: "aux".into(), message: e.to_string() }])?;
    let input = Factor::new(
        vec![spec("X", x)],
        vec![spec("W", w), spec("V1", cards.v1), spec("V2", cards.v2)],
        input_flat,
    )
    .map_err(|e| vec![Violation { path: "input".into(), message: e.to_string() }])?;

    violations.extend(factor_violations(&aux, "aux", INPUT_NORM_TOL));
    violations.extend(factor_violations(&input, "input", INPUT_NORM_TOL));

    if file.class == 1 {
        if !violations.is_empty() {
            return Err(violations);
        }
        let s = StrategyClass1::new(aux.normalized(), input.normalized())
            .expect("factors carry the canonical roles");
        return Ok(Strategy::Class1(s));
    }

    let u_mass = file.u.clone().expect("checked above");
    let u_dist = Factor::unconditioned(vec![spec("U", cards.u)], u_mass)
        .map_err(|e| vec![Violation { path: "u".into(), message: e.to_string() }])?;
    violations.extend(factor_violations(&u_dist, "u", INPUT_NORM_TOL));
    if !violations.is_empty() {
        return Err(violations);
    }
    let s = StrategyClass2::new(u_dist.normalized(), aux.normalized(), input.normalized())
        .expect("factors carry the canonical roles");
    Ok(Strategy::Class2(s))
}

fn nest(flat: &[f64], dims: &[usize]) -> serde_json::Value {
    match dims.split_first() {
        None => serde_json::Value::from(flat[0]),
        Some((&d, rest)) => {
            let chunk = flat.len() / d;
            let items: Vec<serde_json::Value> = (0..d)
                .map(|i| nest(&flat[i * chunk..(i + 1) * chunk], rest))
                .collect();
            serde_json::Value::Array(items)
        }
    }
}

/// Converts a strategy back into its file form, e.g. for frontier sidecars.
pub fn strategy_to_file(s: &Strategy) -> StrategyFile {
    match s {
        Strategy::Class1(s) => {
            let w = s.aux().given()[0].cardinality();
            let (v1, v2) = (s.v1_card(), s.v2_card());
            let x = s.input().outputs()[0].cardinality();
            StrategyFile {
                class: 1,
                cardinalities: Cardinalities { u: 1, v1, v2 },
                u: None,
                aux: nest(s.aux().mass(), &[w, v1, v2]),
                input: nested4(s.input().mass(), w, v1, v2, x),
            }
        }
        Strategy::Class2(s) => {
            let w = s.aux().given()[0].cardinality();
            let (u, v1, v2) = (s.u_card(), s.v1_card(), s.v2_card());
            let x = s.input().outputs()[0].cardinality();
            StrategyFile {
                class: 2,
                cardinalities: Cardinalities { u, v1, v2 },
                u: Some(s.u_dist().mass().to_vec()),
                aux: nest(s.aux().mass(), &[w, u, v1, v2]),
                input: nested4(s.input().mass(), w, v1, v2, x),
            }
        }
    }
}

fn nested4(flat: &[f64], d0: usize, d1: usize, d2: usize, d3: usize) -> Vec<Vec<Vec<Vec<f64>>>> {
    let mut out = Vec::with_capacity(d0);
    let mut it = flat.iter();
    for _ in 0..d0 {
        let mut l1 = Vec::with_capacity(d1);
        for _ in 0..d1 {
            let mut l2 = Vec::with_capacity(d2);
            for _ in 0..d2 {
                let mut l3 = Vec::with_capacity(d3);
                for _ in 0..d3 {
                    l3.push(*it.next().expect("flat length matches dims"));
                }
                l2.push(l3);
            }
            l1.push(l2);
        }
        out.push(l1);
    }
    out
}
