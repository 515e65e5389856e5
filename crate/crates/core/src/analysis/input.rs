//! Input documents:
//!
//! ```text
//! # comment
//! potential: -1/q1 + q2^3/q1^4
//! darboux: (-1, 0)
//! darboux: (1/2 + i, 3)
//! tolerance: 1e-9
//! int-tolerance: 1e-6
//! ```
//!
//! `potential` is required and unique, `darboux` may repeat, tolerances are
//! optional positive numbers. Blank lines and `#` comments are ignored.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct InputError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InputDocument {
    pub potential: String,
    pub darboux: Vec<String>,
    pub tolerance: Option<f64>,
    pub int_tolerance: Option<f64>,
}

fn positive(value: &str, line: usize) -> Result<f64, InputError> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(InputError {
            line,
            message: format!("expected a positive number, found {value:?}"),
        }),
    }
}

pub fn parse_input_document(text: &str) -> Result<InputDocument, InputError> {
    let mut doc = InputDocument::default();
    let mut potential = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(InputError {
                line,
                message: format!("expected \"key: value\", found {content:?}"),
            });
        };
        let value = value.trim();
        let set_once = |slot: &mut Option<f64>, key: &str| -> Result<(), InputError> {
            if slot.is_some() {
                return Err(InputError {
                    line,
                    message: format!("duplicate {key}"),
                });
            }
            *slot = Some(positive(value, line)?);
            Ok(())
        };
        match key.trim() {
            "potential" => {
                if potential.is_some() {
                    return Err(InputError {
                        line,
                        message: "duplicate potential".into(),
                    });
                }
                potential = Some(value.to_string());
            }
            "darboux" => doc.darboux.push(value.to_string()),
            "tolerance" => set_once(&mut doc.tolerance, "tolerance")?,
            "int-tolerance" => set_once(&mut doc.int_tolerance, "int-tolerance")?,
            other => {
                return Err(InputError {
                    line,
                    message: format!("unknown key {other:?}"),
                })
            }
        }
    }
    doc.potential = potential.ok_or(InputError {
        line: 0,
        message: "missing potential".into(),
    })?;
    Ok(doc)
}
