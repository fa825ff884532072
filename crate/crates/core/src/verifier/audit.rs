//! Classification of every catalog entry and the a-b ↔ canonical
//! equivalence checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ode_residual, pde_residual, GridSpec, Verdict, VerifyError, ODE_THRESHOLD, STANDARD_XI};
use crate::solutions::{reduce_ab_to_canonical, Family, FamilyParams, SolutionSpec};

/// Groups of source equations that must each contain a valid entry.
pub const FAMILY_GROUPS: [(&str, &[u32]); 8] = [
    ("19/20/21", &[19, 20, 21]),
    ("22/23/24", &[22, 23, 24]),
    ("25", &[25]),
    ("26", &[26]),
    ("27", &[27]),
    ("28", &[28]),
    ("29", &[29]),
    ("30", &[30]),
];

/// Agreement tolerance for the equivalence checks.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub id: String,
    pub source_equation: u32,
    pub family: Family,
    pub reading: String,
    pub pde_max_abs: f64,
    pub pde_mean_abs: f64,
    pub pde_argmax: (f64, f64),
    pub ode_max_abs: f64,
    pub excluded_points: usize,
    pub valid: bool,
    /// PDE and ODE verdicts coincide.
    pub frames_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub ab_id: String,
    pub canonical_id: String,
    pub shift_c: f64,
    pub max_abs_diff: f64,
    pub confirmed: bool,
    pub ab_valid: bool,
    pub canonical_valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyGroup {
    pub label: String,
    pub entries: usize,
    pub valid: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub grid: GridSpec,
    pub threshold: f64,
    pub ode_threshold: f64,
    pub rows: Vec<AuditRow>,
    pub equivalences: Vec<EquivalenceRow>,
    pub groups: Vec<FamilyGroup>,
}

impl Audit {
    pub fn row(&self, id: &str) -> Option<&AuditRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn all_groups_certified(&self) -> bool {
        self.groups.iter().all(|g| g.certified)
    }
}

fn classify(spec: &SolutionSpec, grid: &GridSpec, threshold: f64) -> Result<AuditRow, VerifyError> {
    let g = grid.for_spec(spec);
    let pde = pde_residual(spec, &g, threshold)?;
    let ode = ode_residual(spec, &STANDARD_XI, ODE_THRESHOLD)?;
    let pde_ok = pde.verdict == Verdict::Valid;
    let ode_ok = ode.verdict == Verdict::Valid;
    Ok(AuditRow {
        id: spec.id.clone(),
        source_equation: spec.source_equation,
        family: spec.family(),
        reading: spec.reading.clone(),
        pde_max_abs: pde.max_abs,
        pde_mean_abs: pde.mean_abs,
        pde_argmax: pde.argmax,
        ode_max_abs: ode.max_abs,
        excluded_points: pde.excluded_points,
        valid: pde_ok && ode_ok,
        frames_agree: pde_ok == ode_ok,
    })
}

/// Largest pointwise difference on the grid, over points regular for both.
pub fn max_difference(a: &SolutionSpec, b: &SolutionSpec, grid: &GridSpec) -> f64 {
    grid.points()
        .par_iter()
        .filter_map(|&(x, t)| match (a.eval(x, t), b.eval(x, t)) {
            (Ok(u), Ok(v)) => Some((u - v).abs()),
            _ => None,
        })
        .reduce(|| 0.0, |p, q| if q.is_nan() || p.is_nan() { f64::NAN } else { p.max(q) })
}

fn same_canonical(reduced: &SolutionSpec, entry: &SolutionSpec) -> bool {
    match (reduced.params, entry.params) {
        (
            FamilyParams::CanonicalTanh { rho: r1, eta: e1, .. },
            FamilyParams::CanonicalTanh { rho: r2, eta: e2, .. },
        ) => entry.source_equation == reduced.source_equation && r1 == r2 && e1 == e2 && entry.sw == reduced.sw,
        _ => false,
    }
}

/// Labels every entry valid/invalid and checks each reducible a-b entry
/// against the catalog's canonical entries with the same signs.
pub fn classify_branches(catalog: &[SolutionSpec], grid: &GridSpec, threshold: f64) -> Result<Audit, VerifyError> {
    let rows = catalog
        .par_iter()
        .map(|s| classify(s, grid, threshold))
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let valid = |id: &str| rows.iter().find(|r| r.id == id).map(|r| r.valid).unwrap_or(false);

    let mut equivalences = Vec::new();
    for ab in catalog.iter().filter(|s| s.family() == Family::ABExpForm) {
        let Ok(reduced) = reduce_ab_to_canonical(ab) else { continue };
        let shift_c = match reduced.params {
            FamilyParams::CanonicalTanh { c, .. } => c,
            _ => 0.0,
        };
        for target in catalog.iter().filter(|e| same_canonical(&reduced, e)) {
            let d = max_difference(ab, target, grid);
            equivalences.push(EquivalenceRow {
                ab_id: ab.id.clone(),
                canonical_id: target.id.clone(),
                shift_c,
                max_abs_diff: d,
                confirmed: d < EQUIVALENCE_TOLERANCE,
                ab_valid: valid(&ab.id),
                canonical_valid: valid(&target.id),
            });
        }
    }

    let groups = FAMILY_GROUPS
        .iter()
        .map(|(label, eqs)| {
            let members: Vec<&AuditRow> = rows.iter().filter(|r| eqs.contains(&r.source_equation)).collect();
            let n_valid = members.iter().filter(|r| r.valid).count();
            FamilyGroup { label: label.to_string(), entries: members.len(), valid: n_valid, certified: n_valid > 0 }
        })
        .collect();
    Ok(Audit { grid: grid.clone(), threshold, ode_threshold: ODE_THRESHOLD, rows, equivalences, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{enumerate_catalog, lookup};

    fn audit() -> Audit {
        classify_branches(&enumerate_catalog(1.0), &GridSpec::standard(), super::super::DEFAULT_THRESHOLD).unwrap()
    }

    #[test]
    fn every_group_certified_and_frames_agree() {
        let a = audit();
        assert!(a.all_groups_certified(), "{:?}", a.groups);
        assert!(a.rows.iter().all(|r| r.frames_agree));
    }

    #[test]
    fn eq24_readings_each_classified_once() {
        let a = audit();
        for reading in ["printed", "coth", "cothhalf"] {
            let n = a.rows.iter().filter(|r| r.source_equation == 24 && r.reading == reading).count();
            assert_eq!(n, 8, "{reading}");
        }
        assert!(a.rows.iter().any(|r| r.source_equation == 24 && r.reading == "cothhalf" && r.valid));
        assert!(a.rows.iter().all(|r| r.source_equation != 24 || r.reading == "cothhalf" || !r.valid));
    }

    #[test]
    fn a_equals_b_matches_c_zero() {
        let a = audit();
        let row = a.equivalences.iter().find(|e| e.ab_id == "eq25+-+" && e.canonical_id == "eq26+++half").unwrap();
        assert!(row.confirmed, "{}", row.max_abs_diff);
        assert!(row.ab_valid && row.canonical_valid);
    }

    #[test]
    fn printed_canonical_argument_is_refuted() {
        let a = audit();
        assert!(!a.row("eq26++").unwrap().valid);
        let row = a.equivalences.iter().find(|e| e.ab_id == "eq25+-+" && e.canonical_id == "eq26++").unwrap();
        assert!(!row.confirmed);
    }

    #[test]
    fn difference_of_identical_specs_is_zero() {
        let s = lookup("eq20++", 1.0).unwrap();
        assert_eq!(max_difference(&s, &s, &GridSpec::standard()), 0.0);
    }
}
