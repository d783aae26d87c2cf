//! Periodic obstructions, coboundary tests and matched-data reports.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FiberWeight;
use crate::flow::SuspensionFlow;
use crate::scalar::Scalar;
use crate::toral::{MapOrbit, OrbitCatalog, RationalPoint};

/// Default tolerance `1e-9 (1 + k_max)`.
pub fn default_tolerance<S: Scalar>(k_max: usize) -> S {
    S::lit(1e-9) * S::from_usize_lossy(1 + k_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionEntry<S> {
    /// Position in the catalog order (period, then representative).
    pub orbit_id: usize,
    pub k: usize,
    pub representative: RationalPoint,
    pub period: S,
    /// `int_gamma phi dt`.
    pub value: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport<S> {
    pub entries: Vec<ObstructionEntry<S>>,
    pub max_abs: S,
    pub tol: S,
    pub is_coboundary_candidate: bool,
}

fn entries_for<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    catalog: &OrbitCatalog<S>,
) -> Vec<ObstructionEntry<S>> {
    let orbits: Vec<&MapOrbit<S>> = catalog.iter().collect();
    orbits
        .par_iter()
        .enumerate()
        .map(|(id, orbit)| ObstructionEntry {
            orbit_id: id,
            k: orbit.prime_period,
            representative: orbit.representative(),
            period: flow.period(orbit),
            value: flow.weight_integral(phi, orbit),
        })
        .collect()
}

pub fn periodic_obstructions_on<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    catalog: &OrbitCatalog<S>,
    tol: S,
) -> ObstructionReport<S> {
    let entries = entries_for(flow, phi, catalog);
    let max_abs = entries
        .iter()
        .map(|e| e.value.abs())
        .fold(S::zero(), S::max);
    ObstructionReport {
        entries,
        max_abs,
        tol,
        is_coboundary_candidate: max_abs <= tol,
    }
}

pub fn periodic_obstructions<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    k_max: usize,
    tol: S,
) -> Result<ObstructionReport<S>> {
    let catalog = flow.base().enumerate_periodic_orbits(k_max)?;
    Ok(periodic_obstructions_on(flow, phi, &catalog, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbelianOutcome<S> {
    /// `int_gamma phi = c k(gamma)` on every enumerated orbit.
    Constant { c: S, max_residual: S },
    /// The orbit with the largest violation of `int_gamma phi = c k(gamma)`.
    Failure {
        c: S,
        row: ObstructionEntry<S>,
        residual: S,
    },
}

impl<S> AbelianOutcome<S> {
    pub fn is_success(&self) -> bool {
        matches!(self, AbelianOutcome::Constant { .. })
    }
}

/// Tests whether `phi` is cohomologous to a constant multiple of the
/// section-crossing class: `c` is read off the orbit of smallest period and
/// checked against every other orbit.
pub fn abelian_coboundary_test<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    k_max: usize,
    tol: S,
) -> Result<AbelianOutcome<S>> {
    if k_max == 0 {
        return Err(Error::EmptyCatalog { k_max });
    }
    let catalog = flow.base().enumerate_periodic_orbits(k_max)?;
    abelian_coboundary_test_on(flow, phi, &catalog, tol)
}

pub fn abelian_coboundary_test_on<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    catalog: &OrbitCatalog<S>,
    tol: S,
) -> Result<AbelianOutcome<S>> {
    let entries = entries_for(flow, phi, catalog);
    let first = entries.first().ok_or(Error::EmptyCatalog {
        k_max: catalog.k_max(),
    })?;
    let c = first.value / S::from_usize_lossy(first.k);
    let mut worst: Option<(S, &ObstructionEntry<S>)> = None;
    for e in &entries {
        let r = (e.value - c * S::from_usize_lossy(e.k)).abs();
        if worst.is_none_or(|(w, _)| r > w) {
            worst = Some((r, e));
        }
    }
    let (residual, row) = worst.expect("nonempty");
    if residual <= tol {
        Ok(AbelianOutcome::Constant {
            c,
            max_residual: residual,
        })
    } else {
        Ok(AbelianOutcome::Failure {
            c,
            row: row.clone(),
            residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchRow<S> {
    pub k: usize,
    pub representative: RationalPoint,
    pub t1: S,
    pub t2: S,
    pub i1: S,
    pub i2: S,
    /// `I1 - I2`.
    pub gap: S,
    /// `chi1 - chi2`.
    pub chi_gap: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Matched,
    Mismatched,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport<S> {
    pub rows: Vec<MatchRow<S>>,
    pub verdict: Verdict,
    pub tol: S,
}

pub const MATCH_CSV_HEADER: &str = "k,rep_x,rep_y,T1,T2,I1,I2,gap,chi_gap";

impl<S: Scalar> MatchReport<S> {
    pub fn max_gap(&self) -> S {
        self.rows.iter().map(|r| r.gap.abs()).fold(S::zero(), S::max)
    }

    pub fn max_chi_gap(&self) -> S {
        self.rows
            .iter()
            .map(|r| r.chi_gap.abs())
            .fold(S::zero(), S::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(MATCH_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                r.k,
                r.representative.x_str(),
                r.representative.y_str(),
                r.t1,
                r.t2,
                r.i1,
                r.i2,
                r.gap,
                r.chi_gap
            ));
        }
        out
    }
}

/// Compares weighted periodic data of two flows over the same base, orbit by
/// orbit (the orbit correspondence is the identity).
pub fn matching_report<S: Scalar>(
    flow1: &SuspensionFlow<S>,
    phi1: &FiberWeight<S>,
    flow2: &SuspensionFlow<S>,
    phi2: &FiberWeight<S>,
    k_max: usize,
    tol: S,
) -> Result<MatchReport<S>> {
    if flow1.base().matrix() != flow2.base().matrix() {
        return Err(Error::BaseMismatch);
    }
    let catalog = flow1.base().enumerate_periodic_orbits(k_max)?;
    Ok(matching_report_on(flow1, phi1, flow2, phi2, &catalog, tol))
}

pub fn matching_report_on<S: Scalar>(
    flow1: &SuspensionFlow<S>,
    phi1: &FiberWeight<S>,
    flow2: &SuspensionFlow<S>,
    phi2: &FiberWeight<S>,
    catalog: &OrbitCatalog<S>,
    tol: S,
) -> MatchReport<S> {
    let orbits: Vec<&MapOrbit<S>> = catalog.iter().collect();
    let rows: Vec<MatchRow<S>> = orbits
        .par_iter()
        .map(|orbit| {
            let d1 = flow1.orbit_flow_data(orbit);
            let d2 = flow2.orbit_flow_data(orbit);
            let i1 = flow1.weight_integral(phi1, orbit);
            let i2 = flow2.weight_integral(phi2, orbit);
            MatchRow {
                k: orbit.prime_period,
                representative: orbit.representative(),
                t1: d1.period,
                t2: d2.period,
                i1,
                i2,
                gap: i1 - i2,
                chi_gap: d1.exponent - d2.exponent,
            }
        })
        .collect();
    let verdict = if rows.iter().all(|r| r.gap.abs() <= tol) {
        Verdict::Matched
    } else {
        Verdict::Mismatched
    };
    MatchReport { rows, verdict, tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::toral::ToralAutomorphism;

    fn cat() -> ToralAutomorphism<f64> {
        ToralAutomorphism::new([[2, 1], [1, 1]]).unwrap()
    }

    fn unit_flow() -> SuspensionFlow<f64> {
        SuspensionFlow::new(cat(), ScalarField::constant(1.0)).unwrap()
    }

    #[test]
    fn obstruction_examples() {
        let f = unit_flow();
        let u = ScalarField::sin([1, 0], 0.3);
        let cb = FiberWeight::fiber_constant(u.coboundary(f.base().matrix()));
        let rep = periodic_obstructions(&f, &cb, 8, 1e-12).unwrap();
        assert!(rep.is_coboundary_candidate, "{}", rep.max_abs);

        let g = FiberWeight::fiber_constant(ScalarField::cos([1, 0], 1.0));
        let rep = periodic_obstructions(&f, &g, 4, 1e-9).unwrap();
        assert_eq!(rep.entries[0].k, 1);
        assert!((rep.entries[0].value - 1.0).abs() < 1e-15);
        assert!(!rep.is_coboundary_candidate);

        let rep = periodic_obstructions(&f, &FiberWeight::constant(0.7), 6, 1e-9).unwrap();
        for e in &rep.entries {
            assert!((e.value - 0.7 * e.k as f64).abs() < 1e-14);
        }
        let ks: Vec<usize> = rep.entries.iter().map(|e| e.k).collect();
        let mut sorted = ks.clone();
        sorted.sort();
        assert_eq!(ks, sorted);
    }

    #[test]
    fn abelian_examples() {
        let f = unit_flow();
        match abelian_coboundary_test(&f, &FiberWeight::constant(2.5), 6, 1e-9).unwrap() {
            AbelianOutcome::Constant { c, max_residual } => {
                assert!((c - 2.5).abs() < 1e-15);
                assert!(max_residual < 1e-13);
            }
            other => panic!("{other:?}"),
        }
        let g = ScalarField::cos([1, 0], 1.0).add(&ScalarField::cos([0, 1], 1.0));
        let out = abelian_coboundary_test(&f, &FiberWeight::fiber_constant(g), 4, 1e-9).unwrap();
        match out {
            AbelianOutcome::Failure { c, .. } => assert!((c - 2.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            abelian_coboundary_test(&f, &FiberWeight::one(), 0, 1e-9),
            Err(Error::EmptyCatalog { .. })
        ));
    }

    #[test]
    fn matching_examples() {
        let a = cat();
        let f1 = unit_flow();
        let rep = matching_report(&f1, &FiberWeight::one(), &f1, &FiberWeight::one(), 5, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Matched);
        assert_eq!(rep.max_gap(), 0.0);

        let r = ScalarField::constant(1.0).add(&ScalarField::cos([1, 0], 0.1));
        let u = ScalarField::sin([1, 0], 0.3);
        let fa = SuspensionFlow::new(a.clone(), r.clone()).unwrap();
        let fb = SuspensionFlow::new(a.clone(), r.add(&u.coboundary(a.matrix()))).unwrap();
        let rep = matching_report(&fa, &FiberWeight::one(), &fb, &FiberWeight::one(), 8, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Matched);
        assert!(rep.max_chi_gap() < 1e-12);

        let rep = matching_report(&f1, &FiberWeight::one(), &fa, &FiberWeight::one(), 3, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Mismatched);
        assert!((rep.rows[0].gap + 0.1).abs() < 1e-15);

        let other = SuspensionFlow::new(
            ToralAutomorphism::new([[1, 1], [1, 2]]).unwrap(),
            ScalarField::constant(1.0),
        )
        .unwrap();
        assert_eq!(
            matching_report(&f1, &FiberWeight::one(), &other, &FiberWeight::one(), 3, 1e-9)
                .unwrap_err(),
            Error::BaseMismatch
        );
    }

    #[test]
    fn csv_header() {
        let f = unit_flow();
        let rep = matching_report(&f, &FiberWeight::one(), &f, &FiberWeight::one(), 3, 1e-9).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,rep_x,rep_y,T1,T2,I1,I2,gap,chi_gap"));
        assert_eq!(lines.count(), 8);
    }
}
