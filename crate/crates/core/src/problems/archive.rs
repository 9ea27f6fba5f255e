//! Line-oriented text archive for generated instances.
//!
//! One instance per file, `key = value` lines in a fixed order, every float
//! printed with 17 significant digits so values round-trip bit-exactly.
//! Shared header:
//!
//! ```text
//! format = interproj-instance-v1
//! class = lin | sdp | soc | norm | exp | demo
//! seed = <u64>
//! dimension = <usize>
//! constraints = <usize>          (lin / soc only)
//! reference = analytic <v> | oracle <v> ok|low | unknown
//! cost = <d floats>
//! anchor = <d floats>
//! ```
//!
//! followed by the family's raw data (`normal_i`, `mat_i` / `shift` /
//! `matrix_size`, `cone_i_{a,b,z,offset}` / `raw_anchor`, `center` / `level`,
//! or the demo constants). Matrices are flattened row-major.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

use super::{
    rebuild_program, DemoData, ExpData, GeneratedInstance, InstanceData, LinData, ProblemClass,
    ProblemSpec, ReferenceValue, SdpData, SocCone, SocData,
};

const FORMAT_TAG: &str = "interproj-instance-v1";

/// Formats a float with 17 significant digits (exact `f64` round trip).
pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_floats(vs: impl IntoIterator<Item = f64>) -> String {
    let mut out = String::new();
    for (i, v) in vs.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", fmt_float(v));
    }
    out
}

fn push_kv(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "{key} = {value}");
}

/// Serializes an instance to the archive text format.
pub fn write_instance(instance: &GeneratedInstance) -> String {
    let mut out = String::new();
    push_kv(&mut out, "format", FORMAT_TAG);
    push_kv(&mut out, "class", instance.spec.class.name());
    push_kv(&mut out, "seed", &instance.spec.seed.to_string());
    push_kv(&mut out, "dimension", &instance.spec.dimension.to_string());
    if let Some(m) = instance.spec.constraints {
        push_kv(&mut out, "constraints", &m.to_string());
    }
    let reference = match instance.reference {
        None => "unknown".to_string(),
        Some(ReferenceValue::Analytic(v)) => format!("analytic {}", fmt_float(v)),
        Some(ReferenceValue::Oracle {
            value,
            low_confidence,
        }) => format!(
            "oracle {} {}",
            fmt_float(value),
            if low_confidence { "low" } else { "ok" }
        ),
    };
    push_kv(&mut out, "reference", &reference);
    push_kv(
        &mut out,
        "cost",
        &fmt_floats(instance.program.objective().cost().iter().copied()),
    );
    push_kv(
        &mut out,
        "anchor",
        &fmt_floats(instance.program.anchor().iter().copied()),
    );

    match &instance.data {
        InstanceData::Lin(data) => {
            for (i, a) in data.normals.iter().enumerate() {
                push_kv(&mut out, &format!("normal_{i}"), &fmt_floats(a.iter().copied()));
            }
        }
        InstanceData::Sdp(data) => {
            push_kv(&mut out, "matrix_size", &data.matrix_size().to_string());
            for (i, a) in data.mats.iter().enumerate() {
                push_kv(
                    &mut out,
                    &format!("mat_{i}"),
                    &fmt_floats(a.as_slice().iter().copied()),
                );
            }
            push_kv(
                &mut out,
                "shift",
                &fmt_floats(data.shift.as_slice().iter().copied()),
            );
        }
        InstanceData::Soc(data) => {
            push_kv(
                &mut out,
                "raw_anchor",
                &fmt_floats(data.raw_anchor.iter().copied()),
            );
            for (i, cone) in data.cones.iter().enumerate() {
                push_kv(
                    &mut out,
                    &format!("cone_{i}_a"),
                    &fmt_floats(cone.a.as_slice().iter().copied()),
                );
                push_kv(&mut out, &format!("cone_{i}_b"), &fmt_floats(cone.b.iter().copied()));
                push_kv(&mut out, &format!("cone_{i}_z"), &fmt_floats(cone.z.iter().copied()));
                push_kv(&mut out, &format!("cone_{i}_offset"), &fmt_float(cone.offset));
            }
        }
        InstanceData::Norm => {}
        InstanceData::Exp(data) => {
            push_kv(&mut out, "center", &fmt_floats(data.center.iter().copied()));
            push_kv(&mut out, "level", &fmt_float(data.level));
        }
        InstanceData::Demo(data) => {
            push_kv(
                &mut out,
                "halfspace_normal",
                &fmt_floats(data.normal.iter().copied()),
            );
            push_kv(&mut out, "halfspace_rhs", &fmt_float(data.rhs));
            push_kv(&mut out, "optimum", &fmt_floats(data.optimum.iter().copied()));
            push_kv(&mut out, "optimum_value", &fmt_float(data.optimum_value));
        }
    }
    out
}

struct Fields<'a> {
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            map.insert(key.trim(), value.trim());
        }
        Ok(Fields { map })
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| Error::Parse(format!("missing field '{key}'")))
    }

    fn get_usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("field '{key}' is not an integer")))
    }

    fn get_floats(&self, key: &str, expected: usize) -> Result<Vec<f64>> {
        let raw = self.get(key)?;
        let values: Vec<f64> = raw
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("field '{key}' has a malformed float")))
            })
            .collect::<Result<_>>()?;
        if values.len() != expected {
            return Err(Error::Parse(format!(
                "field '{key}' has {} values, expected {expected}",
                values.len()
            )));
        }
        Ok(values)
    }

    fn get_float(&self, key: &str) -> Result<f64> {
        Ok(self.get_floats(key, 1)?[0])
    }

    fn get_vector(&self, key: &str, expected: usize) -> Result<Vector> {
        Vector::checked(self.get_floats(key, expected)?)
    }

    fn get_matrix(&self, key: &str, rows: usize, cols: usize) -> Result<Matrix> {
        Matrix::from_vec(rows, cols, self.get_floats(key, rows * cols)?)
    }
}

/// Parses an archived instance, rebuilding its program through the same
/// constructors the generators use.
pub fn parse_instance(text: &str) -> Result<GeneratedInstance> {
    let fields = Fields::parse(text)?;
    if fields.get("format")? != FORMAT_TAG {
        return Err(Error::Parse(format!(
            "unsupported format tag '{}'",
            fields.get("format")?
        )));
    }
    let class_name = fields.get("class")?;
    let class = ProblemClass::parse(class_name)
        .ok_or_else(|| Error::Parse(format!("unknown class '{class_name}'")))?;
    let seed: u64 = fields
        .get("seed")?
        .parse()
        .map_err(|_| Error::Parse("field 'seed' is not an integer".into()))?;
    let dimension = fields.get_usize("dimension")?;

    let mut spec = ProblemSpec::new(class, seed).with_dimension(dimension);
    spec.constraints = match fields.map.get("constraints") {
        Some(_) => Some(fields.get_usize("constraints")?),
        None => None,
    };

    let reference = {
        let raw = fields.get("reference")?;
        let mut parts = raw.split_whitespace();
        match parts.next() {
            Some("unknown") => None,
            Some("analytic") => {
                let v = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse("malformed analytic reference".into()))?;
                Some(ReferenceValue::Analytic(v))
            }
            Some("oracle") => {
                let v = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse("malformed oracle reference".into()))?;
                let low = match parts.next() {
                    Some("ok") => false,
                    Some("low") => true,
                    _ => return Err(Error::Parse("malformed oracle confidence".into())),
                };
                Some(ReferenceValue::Oracle {
                    value: v,
                    low_confidence: low,
                })
            }
            _ => return Err(Error::Parse("malformed reference field".into())),
        }
    };

    let cost = fields.get_vector("cost", dimension)?;
    let anchor = fields.get_vector("anchor", dimension)?;

    let data = match class {
        ProblemClass::Lin => {
            let m = spec
                .constraints
                .ok_or_else(|| Error::Parse("lin archive missing 'constraints'".into()))?;
            let normals = (0..m)
                .map(|i| fields.get_vector(&format!("normal_{i}"), dimension))
                .collect::<Result<Vec<_>>>()?;
            InstanceData::Lin(LinData { normals })
        }
        ProblemClass::Sdp => {
            let n = fields.get_usize("matrix_size")?;
            let mats = (0..dimension)
                .map(|i| fields.get_matrix(&format!("mat_{i}"), n, n))
                .collect::<Result<Vec<_>>>()?;
            let shift = fields.get_matrix("shift", n, n)?;
            InstanceData::Sdp(Arc::new(SdpData { mats, shift }))
        }
        ProblemClass::Soc => {
            let m = spec
                .constraints
                .ok_or_else(|| Error::Parse("soc archive missing 'constraints'".into()))?;
            let raw_anchor = fields.get_vector("raw_anchor", dimension)?;
            let cones = (0..m)
                .map(|i| {
                    Ok(Arc::new(SocCone {
                        a: fields.get_matrix(&format!("cone_{i}_a"), dimension, dimension)?,
                        b: fields.get_vector(&format!("cone_{i}_b"), dimension)?,
                        z: fields.get_vector(&format!("cone_{i}_z"), dimension)?,
                        offset: fields.get_float(&format!("cone_{i}_offset"))?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            InstanceData::Soc(SocData { cones, raw_anchor })
        }
        ProblemClass::Norm => InstanceData::Norm,
        ProblemClass::Exp => InstanceData::Exp(ExpData {
            center: fields.get_vector("center", dimension)?,
            level: fields.get_float("level")?,
        }),
        ProblemClass::Demo => InstanceData::Demo(DemoData {
            normal: fields.get_vector("halfspace_normal", dimension)?,
            rhs: fields.get_float("halfspace_rhs")?,
            optimum: fields.get_vector("optimum", dimension)?,
            optimum_value: fields.get_float("optimum_value")?,
        }),
    };

    let mut program = rebuild_program(class, &data, cost, anchor)?;
    if let Some(r) = &reference {
        program = program.with_reference_optimum(r.value());
    }
    Ok(GeneratedInstance {
        spec,
        program,
        reference,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_demo, gen_exp, gen_lin, gen_norm, gen_sdp, gen_soc};

    fn round_trip(instance: &GeneratedInstance) {
        let text = write_instance(instance);
        let parsed = parse_instance(&text).unwrap();
        // Byte-identical re-serialization is the strongest practical check:
        // it covers every stored float bit-exactly.
        assert_eq!(text, write_instance(&parsed));
        assert_eq!(parsed.program.anchor(), instance.program.anchor());
        assert_eq!(
            parsed.program.h_at_anchor(),
            instance.program.h_at_anchor()
        );
    }

    #[test]
    fn all_classes_round_trip() {
        round_trip(&gen_lin(10, 10, 42).unwrap());
        round_trip(&gen_sdp(6, 6, 42).unwrap());
        round_trip(&gen_soc(8, 3, 42).unwrap());
        round_trip(&gen_norm(12, 42).unwrap());
        round_trip(&gen_exp(2, 42).unwrap());
        round_trip(&gen_demo().unwrap());
    }

    #[test]
    fn serialization_is_seed_stable() {
        let a = write_instance(&gen_soc(8, 3, 7).unwrap());
        let b = write_instance(&gen_soc(8, 3, 7).unwrap());
        assert_eq!(a, b);
        let c = write_instance(&gen_soc(8, 3, 8).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(parse_instance("nonsense").is_err());
        assert!(parse_instance("format = wrong-tag\n").is_err());
        let mut text = write_instance(&gen_norm(4, 1).unwrap());
        text = text.replace("class = norm", "class = banana");
        assert!(parse_instance(&text).is_err());
    }

    #[test]
    fn parsed_program_behaves_identically() {
        let inst = gen_exp(2, 3).unwrap();
        let parsed = parse_instance(&write_instance(&inst)).unwrap();
        let x = Vector::from_slice(&[0.37, -1.2]);
        assert_eq!(
            inst.program.constraint().value(&x),
            parsed.program.constraint().value(&x)
        );
        assert_eq!(
            inst.program.constraint().subgradient(&x),
            parsed.program.constraint().subgradient(&x)
        );
    }
}
