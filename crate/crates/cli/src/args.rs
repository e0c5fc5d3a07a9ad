//! Flag value types shared by the subcommands.

use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// `--alpha`: one scale for every state, or a comma separated list.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    Scalar(f64),
    List(Vec<f64>),
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::Scalar(1.0)
    }
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let values = parse_list(s)?;
        match values.as_slice() {
            [v] if !s.contains(',') => Ok(Alpha::Scalar(*v)),
            _ => Ok(Alpha::List(values)),
        }
    }
}

impl Alpha {
    pub fn resolve(&self, n: usize) -> CliResult<Vec<f64>> {
        let v = match self {
            Alpha::Scalar(a) => vec![*a; n],
            Alpha::List(v) if v.len() == n => v.clone(),
            Alpha::List(v) => {
                return Err(CliError::Input(format!(
                    "--alpha: expected 1 or {n} values, found {}",
                    v.len()
                )))
            }
        };
        if let Some(a) = v.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(CliError::Input(format!(
                "--alpha: scales must be positive, got {a}"
            )));
        }
        Ok(v)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("invalid number {p:?}: {e}"))
        })
        .collect()
}

/// `--grid fmin:fmax:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_triplet(s, "fmin:fmax:step")?;
        let g = Grid {
            min: v[0],
            max: v[1],
            step: v[2],
        };
        if !(g.step > 0.0) || g.max < g.min || g.min < 0.0 {
            return Err(format!("need 0 <= fmin <= fmax and step > 0, got {s}"));
        }
        Ok(g)
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|j| self.min + j as f64 * self.step)
            .collect()
    }
}

/// `--times t0:t1:steps`, `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_triplet(s, "t0:t1:steps")?;
        let steps = v[2];
        if steps < 1.0 || steps.fract() != 0.0 {
            return Err(format!("steps must be a positive integer, got {}", steps));
        }
        if !(v[0] >= 0.0) || v[1] < v[0] {
            return Err(format!("need 0 <= t0 <= t1, got {s}"));
        }
        Ok(TimeGrid {
            start: v[0],
            end: v[1],
            steps: steps as usize,
        })
    }
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / self.steps as f64;
        (0..=self.steps)
            .map(|j| self.start + j as f64 * h)
            .collect()
    }
}

fn parse_triplet(s: &str, form: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected {form}, got {s:?}"));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| format!("invalid number {p:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(v)
            } else {
                Err(format!("non-finite value in {s:?}"))
            }
        })
}

/// `--x0 ek:<index>:<scale>` (1-based) or an explicit vector.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Unit { index: usize, scale: f64 },
    Vector(Vec<f64>),
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(rest) = s.strip_prefix("ek:") {
            let (i, a) = rest
                .split_once(':')
                .ok_or_else(|| format!("expected ek:<index>:<scale>, got {s:?}"))?;
            let index: usize = i.parse().map_err(|e| format!("invalid index {i:?}: {e}"))?;
            let scale: f64 = a.parse().map_err(|e| format!("invalid scale {a:?}: {e}"))?;
            if index == 0 {
                return Err("state indices are 1-based".into());
            }
            return Ok(InitialState::Unit { index, scale });
        }
        parse_list(s).map(InitialState::Vector)
    }
}

impl InitialState {
    pub fn resolve(&self, n: usize) -> CliResult<Vec<f64>> {
        match self {
            InitialState::Unit { index, scale } => {
                if *index > n {
                    return Err(CliError::Input(format!(
                        "--x0: state {index} out of range 1..={n}"
                    )));
                }
                let mut x = vec![0.0; n];
                x[index - 1] = *scale;
                Ok(x)
            }
            InitialState::Vector(v) if v.len() == n => Ok(v.clone()),
            InitialState::Vector(v) => Err(CliError::Input(format!(
                "--x0: expected {n} values, found {}",
                v.len()
            ))),
        }
    }
}

/// 1-based state flag to a 0-based index.
pub fn state_index(k: usize, n: usize) -> CliResult<usize> {
    if k == 0 || k > n {
        return Err(CliError::Input(format!("--state {k} out of range 1..={n}")));
    }
    Ok(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_forms() {
        assert_eq!("0.5".parse::<Alpha>().unwrap(), Alpha::Scalar(0.5));
        assert_eq!("1,2".parse::<Alpha>().unwrap(), Alpha::List(vec![1.0, 2.0]));
        assert!("0.5,".parse::<Alpha>().is_err());
        assert!(Alpha::List(vec![1.0, 2.0]).resolve(3).is_err());
        assert!(Alpha::Scalar(-1.0).resolve(3).is_err());
        assert_eq!(Alpha::Scalar(2.0).resolve(2).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn grids() {
        let g: Grid = "0:1:0.25".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        let t: TimeGrid = "0:2:4".parse().unwrap();
        assert_eq!(t.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!("0:2:1.5".parse::<TimeGrid>().is_err());
    }

    #[test]
    fn initial_states() {
        let x: InitialState = "ek:2:0.1".parse().unwrap();
        assert_eq!(x.resolve(3).unwrap(), vec![0.0, 0.1, 0.0]);
        assert!(x.resolve(1).is_err());
        assert!("ek:0:1".parse::<InitialState>().is_err());
        let v: InitialState = "0.1,0.2".parse().unwrap();
        assert_eq!(v.resolve(2).unwrap(), vec![0.1, 0.2]);
    }
}
