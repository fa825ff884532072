//! The catalog as a flat CSV table, and back.

use serde::{Deserialize, Serialize};

use crate::solutions::{Family, FamilyParams, Scale, SolutionError, SolutionSpec};
use crate::Sign;

pub const HEADER: [&str; 15] =
    ["id", "source_equation", "family", "reading", "a0", "s1", "sw", "aux", "k", "c1", "c2", "a", "b", "c", "valid"];

/// One catalog row. `aux` holds the family's discrete parameters as
/// `name=value` pairs separated by `;`; numeric columns that do not apply
/// to the family are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub id: String,
    pub source_equation: u32,
    pub family: String,
    pub reading: String,
    pub a0: i8,
    pub s1: String,
    pub sw: String,
    pub aux: String,
    pub k: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub valid: bool,
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::Half => "half",
        Scale::Full => "full",
    }
}

impl CatalogRow {
    pub fn from_spec(spec: &SolutionSpec, valid: bool) -> CatalogRow {
        let mut row = CatalogRow {
            id: spec.id.clone(),
            source_equation: spec.source_equation,
            family: spec.family().to_string(),
            reading: spec.reading.clone(),
            a0: spec.a0,
            s1: spec.s1.to_string(),
            sw: spec.sw.to_string(),
            aux: String::new(),
            k: spec.k,
            c1: None,
            c2: None,
            a: None,
            b: None,
            c: None,
            valid,
        };
        match spec.params {
            FamilyParams::GeneralExpRatio { c1, c2 } => {
                row.c1 = Some(c1);
                row.c2 = Some(c2);
            }
            FamilyParams::TanhKink { c1, scale } | FamilyParams::CothSingular { c1, scale } => {
                row.c1 = Some(c1);
                row.aux = format!("scale={}", scale_name(scale));
            }
            FamilyParams::ABExpForm { sigma, tau, a, b } => {
                row.aux = format!("sigma={sigma};tau={tau}");
                row.a = Some(a);
                row.b = Some(b);
            }
            FamilyParams::CanonicalTanh { rho, eta, scale, c, chi } => {
                row.aux = format!("rho={rho};eta={eta};chi={chi};scale={}", scale_name(scale));
                row.c = Some(c);
            }
        }
        row
    }

    fn aux_value(&self, name: &str) -> Result<&str, SolutionError> {
        self.aux
            .split(';')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| self.bad(&format!("missing aux '{name}'")))
    }

    fn bad(&self, what: &str) -> SolutionError {
        SolutionError::InvalidParameter(format!("{}: {what}", self.id))
    }

    fn sign(&self, text: &str) -> Result<Sign, SolutionError> {
        let mut chars = text.chars();
        match (chars.next().and_then(Sign::from_char), chars.next()) {
            (Some(s), None) => Ok(s),
            _ => Err(self.bad(&format!("bad sign '{text}'"))),
        }
    }

    fn aux_sign(&self, name: &str) -> Result<Sign, SolutionError> {
        self.sign(self.aux_value(name)?)
    }

    fn aux_scale(&self) -> Result<Scale, SolutionError> {
        match self.aux_value("scale")? {
            "half" => Ok(Scale::Half),
            "full" => Ok(Scale::Full),
            other => Err(self.bad(&format!("bad scale '{other}'"))),
        }
    }

    fn number(&self, v: Option<f64>, name: &str) -> Result<f64, SolutionError> {
        v.ok_or_else(|| self.bad(&format!("missing column {name}")))
    }

    /// Rebuilds the entry exactly as the columns describe it.
    pub fn to_spec(&self) -> Result<SolutionSpec, SolutionError> {
        if !(self.k.is_finite() && self.k != 0.0) {
            return Err(self.bad("k must be finite and nonzero"));
        }
        if ![-1, 0, 1].contains(&self.a0) {
            return Err(self.bad("a0 must be -1, 0 or 1"));
        }
        let family: Family = self.family.parse()?;
        let params = match family {
            Family::GeneralExpRatio => FamilyParams::GeneralExpRatio {
                c1: self.number(self.c1, "c1")?,
                c2: self.number(self.c2, "c2")?,
            },
            Family::TanhKink => FamilyParams::TanhKink { c1: self.number(self.c1, "c1")?, scale: self.aux_scale()? },
            Family::CothSingular => {
                FamilyParams::CothSingular { c1: self.number(self.c1, "c1")?, scale: self.aux_scale()? }
            }
            Family::ABExpForm => FamilyParams::ABExpForm {
                sigma: self.aux_sign("sigma")?,
                tau: self.aux_sign("tau")?,
                a: self.number(self.a, "a")?,
                b: self.number(self.b, "b")?,
            },
            Family::CanonicalTanh => FamilyParams::CanonicalTanh {
                rho: self.aux_sign("rho")?,
                eta: self.aux_sign("eta")?,
                scale: self.aux_scale()?,
                c: self.number(self.c, "c")?,
                chi: self.aux_sign("chi")?,
            },
        };
        Ok(SolutionSpec {
            id: self.id.clone(),
            source_equation: self.source_equation,
            reading: self.reading.clone(),
            a0: self.a0,
            s1: self.sign(&self.s1)?,
            sw: self.sign(&self.sw)?,
            k: self.k,
            params,
            shift: 0.0,
        })
    }
}

pub fn write_rows(rows: &[CatalogRow]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in rows {
        let num = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        w.write_record([
            r.id.clone(),
            r.source_equation.to_string(),
            r.family.clone(),
            r.reading.clone(),
            r.a0.to_string(),
            r.s1.clone(),
            r.sw.clone(),
            r.aux.clone(),
            format!("{:.16e}", r.k),
            num(r.c1),
            num(r.c2),
            num(r.a),
            num(r.b),
            num(r.c),
            r.valid.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_rows(text: &str) -> Result<Vec<CatalogRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::enumerate_catalog;

    #[test]
    fn every_entry_round_trips() {
        let cat = enumerate_catalog(1.5);
        let rows: Vec<CatalogRow> = cat.iter().map(|s| CatalogRow::from_spec(s, true)).collect();
        let text = write_rows(&rows).unwrap();
        assert!(text.starts_with("id,source_equation,family,reading,a0,s1,sw,aux,k,c1,c2,a,b,c,valid\n"));
        let back = read_rows(&text).unwrap();
        assert_eq!(back, rows);
        for (row, spec) in back.iter().zip(&cat) {
            assert_eq!(&row.to_spec().unwrap(), spec);
        }
    }

    #[test]
    fn malformed_rows_rejected() {
        let spec = crate::solutions::lookup("eq25+-+", 1.0).unwrap();
        let mut row = CatalogRow::from_spec(&spec, true);
        row.aux = "sigma=+".into();
        assert!(row.to_spec().is_err());
        row.aux = "sigma=x;tau=+".into();
        assert!(row.to_spec().is_err());
        let mut row = CatalogRow::from_spec(&spec, true);
        row.a0 = 2;
        assert!(row.to_spec().is_err());
    }
}
