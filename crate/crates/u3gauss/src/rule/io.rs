//! Rule file format: structured JSON with every number carried as a decimal
//! string of 17 significant digits, which round-trips `f64` bit-exactly on
//! any platform.

use super::{Block, CubatureRule, PointRule, Provenance, RuleError};
use crate::search::RuleStructure;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Either a generator-form rule or an explicit point rule.
#[derive(Debug, Clone)]
pub enum RuleFile {
    Generator(CubatureRule),
    Points {
        rule: PointRule,
        name: Option<String>,
        degree: Option<u32>,
    },
}

impl RuleFile {
    pub fn name(&self) -> Option<&str> {
        match self {
            RuleFile::Generator(rule) => Some(rule.name()),
            RuleFile::Points { name, .. } => name.as_deref(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    weight: String,
    params: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FileJson {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structure: Option<[u32; 6]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<Vec<BlockJson>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[String; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
}

fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(s: &str, what: &str) -> Result<f64, RuleError> {
    let value: f64 = s
        .trim()
        .parse()
        .map_err(|_| RuleError::Format(format!("{what}: cannot parse number {s:?}")))?;
    if !value.is_finite() {
        return Err(RuleError::Format(format!("{what}: non-finite number {s:?}")));
    }
    Ok(value)
}

/// Serialize to the JSON text form.
pub fn save_str(file: &RuleFile) -> String {
    let json = match file {
        RuleFile::Generator(rule) => FileJson {
            kind: "generator".into(),
            name: Some(rule.name().to_string()),
            m: Some(rule.m()),
            degree: Some(rule.degree()),
            structure: Some(rule.structure().u3_counts()),
            provenance: Some(rule.provenance().as_str().to_string()),
            blocks: Some(
                (1..=6)
                    .map(|index| {
                        let class = crate::symmetry::ClassType::from_index(index).unwrap();
                        rule.class_blocks(class)
                            .iter()
                            .map(|b| BlockJson {
                                weight: format_number(b.weight),
                                params: b.params.iter().copied().map(format_number).collect(),
                            })
                            .collect()
                    })
                    .collect(),
            ),
            points: None,
            weights: None,
        },
        RuleFile::Points { rule, name, degree } => FileJson {
            kind: "points".into(),
            name: name.clone(),
            m: None,
            degree: *degree,
            structure: None,
            provenance: None,
            blocks: None,
            points: Some(
                rule.points()
                    .iter()
                    .map(|p| [format_number(p[0]), format_number(p[1]), format_number(p[2])])
                    .collect(),
            ),
            weights: Some(rule.weights().iter().copied().map(format_number).collect()),
        },
    };
    serde_json::to_string_pretty(&json).expect("serializable")
}

/// Parse and validate the JSON text form.
pub fn load_str(text: &str) -> Result<RuleFile, RuleError> {
    let json: FileJson =
        serde_json::from_str(text).map_err(|e| RuleError::Format(e.to_string()))?;
    match json.kind.as_str() {
        "generator" => {
            let m = json
                .m
                .ok_or_else(|| RuleError::Format("generator file must carry field m".into()))?;
            let counts = json.structure.ok_or_else(|| {
                RuleError::Format("generator file must carry field structure".into())
            })?;
            if let Some(degree) = json.degree {
                if degree != 2 * m + 1 {
                    return Err(RuleError::Invariant(format!(
                        "degree {degree} does not match 2m+1 = {}",
                        2 * m + 1
                    )));
                }
            }
            let structure = RuleStructure::u3(counts);
            let blocks_json = json
                .blocks
                .ok_or_else(|| RuleError::Format("generator file must carry blocks".into()))?;
            if blocks_json.len() != 6 {
                return Err(RuleError::Format(format!(
                    "blocks must list all 6 classes, got {}",
                    blocks_json.len()
                )));
            }
            let mut blocks: [Vec<Block>; 6] = Default::default();
            for (index, class_blocks) in blocks_json.into_iter().enumerate() {
                for (i, b) in class_blocks.into_iter().enumerate() {
                    let place = format!("blocks[{index}][{i}]");
                    blocks[index].push(Block {
                        weight: parse_number(&b.weight, &format!("{place}.weight"))?,
                        params: b
                            .params
                            .iter()
                            .map(|p| parse_number(p, &format!("{place}.params")))
                            .collect::<Result<_, _>>()?,
                    });
                }
            }
            let provenance = match json.provenance.as_deref() {
                None => Provenance::Imported,
                Some(p) => Provenance::from_str(p).ok_or_else(|| {
                    RuleError::Format(format!("unknown provenance {p:?}"))
                })?,
            };
            let name = json
                .name
                .unwrap_or_else(|| format!("U3:{}-?({})", 2 * m + 1, structure));
            CubatureRule::new(m, structure, blocks, name, provenance).map(RuleFile::Generator)
        }
        "points" => {
            let points_json = json
                .points
                .ok_or_else(|| RuleError::Format("points file must carry points".into()))?;
            let weights_json = json
                .weights
                .ok_or_else(|| RuleError::Format("points file must carry weights".into()))?;
            let mut points = Vec::with_capacity(points_json.len());
            for (i, p) in points_json.iter().enumerate() {
                points.push([
                    parse_number(&p[0], &format!("points[{i}][0]"))?,
                    parse_number(&p[1], &format!("points[{i}][1]"))?,
                    parse_number(&p[2], &format!("points[{i}][2]"))?,
                ]);
            }
            let weights = weights_json
                .iter()
                .enumerate()
                .map(|(i, w)| parse_number(w, &format!("weights[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let rule = PointRule::new(points, weights)?;
            let total = rule.weight_sum();
            if (total - 4.0 * PI).abs() > 1e-10 * 4.0 * PI {
                return Err(RuleError::Invariant(format!(
                    "weights sum to {total:.12}, expected 4π"
                )));
            }
            Ok(RuleFile::Points {
                rule,
                name: json.name,
                degree: json.degree,
            })
        }
        other => Err(RuleError::Format(format!("unknown kind {other:?}"))),
    }
}

pub fn save(file: &RuleFile, path: &Path) -> Result<(), RuleError> {
    std::fs::write(path, save_str(file) + "\n")?;
    Ok(())
}

pub fn load(path: &Path) -> Result<RuleFile, RuleError> {
    let text = std::fs::read_to_string(path)?;
    load_str(&text)
}

#[cfg(test)]
mod tests {
    use super::super::builtin;
    use super::*;

    #[test]
    fn generator_round_trip_is_bit_exact() {
        let rule = builtin("m7").unwrap();
        let text = save_str(&RuleFile::Generator(rule.clone()));
        let loaded = match load_str(&text).unwrap() {
            RuleFile::Generator(r) => r,
            _ => panic!("expected generator kind"),
        };
        assert_eq!(loaded, rule);
    }

    #[test]
    fn point_round_trip_is_bit_exact() {
        let rule = crate::product::u3_product_rule(4);
        let file = RuleFile::Points {
            rule: rule.clone(),
            name: None,
            degree: Some(7),
        };
        let text = save_str(&file);
        match load_str(&text).unwrap() {
            RuleFile::Points { rule: loaded, degree, .. } => {
                assert_eq!(loaded, rule);
                assert_eq!(loaded.len(), 32);
                assert_eq!(degree, Some(7));
            }
            _ => panic!("expected points kind"),
        }
    }

    #[test]
    fn off_sphere_block_is_rejected() {
        let rule = builtin("m5").unwrap();
        let mut text = save_str(&RuleFile::Generator(rule));
        // corrupt the tilted-pair block so 2z^2 + h^2 = 0.9
        let zeta = format!("{:.16e}", 1.0 / 11f64.sqrt());
        let bad = format!("{:.16e}", (0.9f64 - 2.0 / 11.0).sqrt());
        let eta = format!("{:.16e}", 3.0 / 11f64.sqrt());
        assert!(text.contains(&eta));
        text = text.replace(&eta, &bad);
        assert!(text.contains(&zeta));
        let err = load_str(&text).unwrap_err();
        assert!(matches!(err, RuleError::Invariant(_)), "{err}");
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        let err = load_str("{\"kind\": \"generator\", \"m\": 1}").unwrap_err();
        assert!(err.to_string().contains("structure"));

        let err = load_str(
            "{\"kind\": \"points\", \"points\": [[\"x\",\"0\",\"0\"]], \"weights\": [\"1\"]}",
        )
        .unwrap_err();
        assert!(err.to_string().contains("points[0]"));
    }
}
