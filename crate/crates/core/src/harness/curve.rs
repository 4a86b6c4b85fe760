//! Per-generation fitness curves (`fitness_gen_r<r>.csv`).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const CURVE_HEADER: &str = "generation,eval_steps,fitness_b1,fitness_b2,combined,best_sample";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub generation: u64,
    /// Cumulative environment steps spent on candidate evaluations.
    pub eval_steps: u64,
    /// Centroid return under each behavior.
    pub fitness_b1: f64,
    pub fitness_b2: f64,
    pub combined: f64,
    /// Best candidate fitness of the generation.
    pub best_sample: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitnessCurve {
    pub rows: Vec<CurveRow>,
}

impl FitnessCurve {
    pub fn last(&self) -> Option<&CurveRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CURVE_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.generation, r.eval_steps, r.fitness_b1, r.fitness_b2, r.combined, r.best_sample
            )
            .expect("writing to a String");
        }
        out
    }

    /// Parses CSV text; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CURVE_HEADER => {}
            Some(h) => {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header {CURVE_HEADER:?}, got {h:?}"),
                ))
            }
            None => return Err(Error::parse(path, 1, "empty curve file")),
        }
        let mut rows: Vec<CurveRow> = Vec::new();
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected 6 fields, got {}", fields.len()),
                ));
            }
            let int = |k: usize| -> Result<u64> {
                fields[k]
                    .parse()
                    .map_err(|e| Error::parse(path, line_no, format!("field {}: {e}", k + 1)))
            };
            let float = |k: usize| -> Result<f64> {
                let v: f64 = fields[k]
                    .parse()
                    .map_err(|e| Error::parse(path, line_no, format!("field {}: {e}", k + 1)))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::parse(
                        path,
                        line_no,
                        format!("field {} is not finite", k + 1),
                    ))
                }
            };
            let row = CurveRow {
                generation: int(0)?,
                eval_steps: int(1)?,
                fitness_b1: float(2)?,
                fitness_b2: float(3)?,
                combined: float(4)?,
                best_sample: float(5)?,
            };
            if let Some(prev) = rows.last() {
                if row.generation <= prev.generation {
                    return Err(Error::parse(
                        path,
                        line_no,
                        "generation indices must increase",
                    ));
                }
                if row.eval_steps < prev.eval_steps {
                    return Err(Error::parse(path, line_no, "eval_steps decreased"));
                }
            }
            rows.push(row);
        }
        Ok(FitnessCurve { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_malformed() {
        let p = Path::new("c.csv");
        assert!(FitnessCurve::parse("", p).is_err());
        assert!(FitnessCurve::parse("a,b\n", p).is_err());
        let bad = format!("{CURVE_HEADER}\n1,10,1,2,3\n");
        match FitnessCurve::parse(&bad, p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad = format!("{CURVE_HEADER}\n2,10,1,2,3,4\n1,20,1,2,3,4\n");
        assert!(FitnessCurve::parse(&bad, p).is_err());
    }

    proptest! {
        #[test]
        fn write_parse_write_is_identical(
            vals in prop::collection::vec((-1e5f64..1e5, -1e5f64..1e5, -1e5f64..1e5, 0u64..1000), 0..20)
        ) {
            let mut steps = 0;
            let rows = vals.iter().enumerate().map(|(i, &(a, b, c, s))| {
                steps += s;
                CurveRow { generation: i as u64 + 1, eval_steps: steps, fitness_b1: a, fitness_b2: b, combined: a + b, best_sample: c }
            }).collect();
            let curve = FitnessCurve { rows };
            let text = curve.to_csv();
            let back = FitnessCurve::parse(&text, Path::new("mem")).unwrap();
            prop_assert_eq!(&back, &curve);
            prop_assert_eq!(back.to_csv(), text);
        }
    }
}
