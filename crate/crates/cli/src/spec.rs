//! Covering-spec files: JSON documents describing one covering.

use hurwitz_core::{BoundaryComponent, Covering0, Covering1, Error, Pole, C64};
use serde::{Deserialize, Serialize};

use crate::{CliError, ExitStatus};

/// A complex number as a two-element array.
pub type Pair = [f64; 2];

pub fn to_c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn to_pair(z: C64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSpec {
    pub b: Pair,
    pub c: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringSpec {
    pub genus: u8,
    pub profile: Vec<usize>,
    /// Genus 0: `a_0, ..., a_(k1-2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_coeffs: Option<Vec<Pair>>,
    /// Genus 1: `sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Pair>,
    /// Genus 1: the constant `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Pair>,
    pub poles: Vec<PoleSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Genus0(Covering0),
    Genus1(Covering1),
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

/// Position of the first occurrence of `"key"`, or the start of the file.
fn key_position(text: &str, key: &str) -> (usize, usize) {
    text.find(&format!("\"{key}\"")).map_or((1, 1), |o| line_col(text, o))
}

fn invalid(text: &str, key: &str, msg: impl Into<String>) -> CliError {
    let (line, col) = key_position(text, key);
    CliError::new(ExitStatus::Parse, format!("line {line}, column {col}: {}", msg.into()))
}

/// Maps a core construction error. Boundary errors name the component.
pub fn construction_error(text: &str, e: Error) -> CliError {
    match e {
        Error::OnBoundary { component, indices } => {
            let what = match component {
                BoundaryComponent::S1 => "coincident poles",
                BoundaryComponent::S2 => "vanishing leading tail coefficient",
            };
            CliError::new(
                ExitStatus::Boundary,
                format!("covering lies on boundary component {component} ({what}; poles {indices:?})"),
            )
        }
        Error::CommonRoot(r) => CliError::new(
            ExitStatus::Boundary,
            format!("covering lies on boundary component S2 (p' numerator vanishes at a pole, normalized resultant {r:e})"),
        ),
        Error::InvalidModulus(m) => invalid(text, "modulus", format!("invalid modulus: {m}")),
        other => invalid(text, "poles", other.to_string()),
    }
}

impl CoveringSpec {
    /// Parses and checks the document shape; errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: CoveringSpec = serde_json::from_str(text).map_err(|e| {
            CliError::new(
                ExitStatus::Parse,
                format!("line {}, column {}: {e}", e.line(), e.column()),
            )
        })?;
        spec.check_shape(text)?;
        Ok(spec)
    }

    fn check_shape(&self, text: &str) -> Result<(), CliError> {
        let tails: Vec<usize> = self.poles.iter().map(|p| p.c.len()).collect();
        if let Some(i) = tails.iter().position(|&k| k == 0) {
            return Err(invalid(text, "c", format!("pole {i} has no tail coefficients")));
        }
        match self.genus {
            0 => {
                let Some(coeffs) = &self.poly_coeffs else {
                    return Err(invalid(text, "genus", "genus 0 requires \"poly_coeffs\""));
                };
                if self.modulus.is_some() || self.constant.is_some() {
                    return Err(invalid(text, "modulus", "\"modulus\" and \"constant\" are genus-1 fields"));
                }
                let mut expected = vec![coeffs.len() + 1];
                expected.extend(&tails);
                if self.profile != expected {
                    return Err(invalid(
                        text,
                        "profile",
                        format!("profile {:?} does not match the coefficients (expected {expected:?})", self.profile),
                    ));
                }
            }
            1 => {
                if self.modulus.is_none() || self.constant.is_none() {
                    return Err(invalid(text, "genus", "genus 1 requires \"modulus\" and \"constant\""));
                }
                if self.poly_coeffs.is_some() {
                    return Err(invalid(text, "poly_coeffs", "\"poly_coeffs\" is a genus-0 field"));
                }
                if self.profile != tails {
                    return Err(invalid(
                        text,
                        "profile",
                        format!("profile {:?} does not match the poles (expected {tails:?})", self.profile),
                    ));
                }
            }
            g => return Err(invalid(text, "genus", format!("genus must be 0 or 1, got {g}"))),
        }
        Ok(())
    }

    fn core_poles(&self) -> Vec<Pole> {
        self.poles
            .iter()
            .map(|p| Pole::new(to_c(p.b), p.c.iter().copied().map(to_c).collect()))
            .collect()
    }

    /// Builds the covering. `text` (the original document, if any) is used
    /// to position validation errors.
    pub fn build(&self, text: &str) -> Result<Model, CliError> {
        let model = match self.genus {
            0 => {
                let coeffs = self.poly_coeffs.as_deref().unwrap_or_default();
                Covering0::new(coeffs.len() + 1, coeffs.iter().copied().map(to_c).collect(), self.core_poles())
                    .map(Model::Genus0)
            }
            _ => Covering1::new(
                to_c(self.modulus.unwrap_or_default()),
                to_c(self.constant.unwrap_or_default()),
                self.core_poles(),
            )
            .map(Model::Genus1),
        };
        model.map_err(|e| construction_error(text, e))
    }

    pub fn from_model(model: &Model) -> Self {
        let poles = |ps: &[Pole]| {
            ps.iter()
                .map(|p| PoleSpec {
                    b: to_pair(p.b),
                    c: p.c.iter().copied().map(to_pair).collect(),
                })
                .collect()
        };
        match model {
            Model::Genus0(c) => CoveringSpec {
                genus: 0,
                profile: c.profile(),
                poly_coeffs: Some(c.poly_coeffs().into_iter().map(to_pair).collect()),
                modulus: None,
                constant: None,
                poles: poles(c.poles()),
            },
            Model::Genus1(c) => CoveringSpec {
                genus: 1,
                profile: c.profile(),
                poly_coeffs: None,
                modulus: Some(to_pair(c.sigma())),
                constant: Some(to_pair(c.constant())),
                poles: poles(c.poles()),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}
