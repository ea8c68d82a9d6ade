use serde::Serialize;

use super::catalan::{catalan_sequence, ln_big};
use super::picard::{resolvent, working_norm, Variant};
use crate::error::{LabError, Result};
use crate::forcing::PhysicalParams;
use crate::spectral::{bilinear_b_exact, norm, SpectralField};

/// Per-term record of the Oseen series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OseenTerm {
    pub n: usize,
    /// `||U_n||` in the composite norm.
    pub norm: f64,
    /// `(nu/C) A_n (C ||U_1|| / nu)^n`.
    pub catalan_bound: f64,
    /// `max |xi|` over the nonzero coefficients of `U_n`.
    pub support_radius: f64,
    /// `n rho2 / ell0`.
    pub support_limit: f64,
    /// `||sum_{k<=n} U_k - U_ref||`, when a reference solution is given.
    pub partial_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OseenLedger {
    pub c_emp: f64,
    /// `4 C ||U_1|| / nu`; the series is certified to converge below one.
    pub contraction_radius: f64,
    pub terms: Vec<OseenTerm>,
}

impl OseenLedger {
    /// First `n` whose Catalan bound falls below `tol`.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.terms.iter().find(|t| t.catalan_bound < tol).map(|t| t.n)
    }
}

#[derive(Clone, Debug)]
pub struct OseenExpansion {
    pub ledger: OseenLedger,
    pub terms: Vec<SpectralField>,
    pub partial_sum: SpectralField,
}

fn support_radius(u: &SpectralField) -> f64 {
    u.support(0.0)
        .into_iter()
        .map(|i| u.grid.xi_norm(i))
        .fold(0.0, f64::max)
}

/// Oseen series of the classical stationary equations,
/// `U_1 = (-nu Delta)^{-1} f`, `U_n = sum_{k=1}^{n-1} B(U_k, U_{n-k})`.
///
/// Terms are exact lattice convolutions, so supports are exact. When the
/// growing support would reach the dealiasing cutoff, `n_max` is lowered
/// and the reduction logged. `c_emp` calibrates the Catalan bound.
pub fn oseen_expand(
    f: &SpectralField,
    params: &PhysicalParams,
    n_max: usize,
    c_emp: f64,
    reference: Option<&SpectralField>,
) -> Result<OseenExpansion> {
    params.validate()?;
    if n_max == 0 {
        return Err(LabError::Param("Oseen expansion needs at least one term".into()));
    }
    let g = f.grid;
    let step = params.rho2 / params.ell0;
    let requested = n_max;
    let mut n_max = n_max;
    while n_max > 1 && n_max as f64 * step >= g.kappa_max() {
        n_max -= 1;
    }
    if n_max as f64 * step >= g.kappa_max() {
        return Err(LabError::Grid(format!(
            "annulus radius {step} already reaches the dealiasing cutoff {}",
            g.kappa_max()
        )));
    }
    if n_max < requested {
        log::info!("Oseen expansion cut from {requested} to {n_max} terms to stay inside the dealiasing cutoff");
    }
    let nu = params.nu;
    let kind = working_norm(Variant::Classical, params);
    let u1 = resolvent(f, nu, 0.0);
    let u1_norm = norm(&u1, kind)?;
    let catalan = catalan_sequence(n_max);
    let mut terms: Vec<SpectralField> = vec![u1];
    for n in 2..=n_max {
        let mut acc = SpectralField::zeros(g);
        // Both orderings of each unordered pair (k, n - k).
        for k in 1..=(n - 1) / 2 {
            let b = bilinear_b_exact(&terms[k - 1], &terms[n - k - 1], nu);
            let c = bilinear_b_exact(&terms[n - k - 1], &terms[k - 1], nu);
            acc = acc.add(&b).add(&c);
        }
        if n % 2 == 0 {
            let h = &terms[n / 2 - 1];
            acc = acc.add(&bilinear_b_exact(h, h, nu));
        }
        acc.check_finite("Oseen term")?;
        terms.push(acc);
    }
    let mut ledger_terms = Vec::with_capacity(n_max);
    let mut partial = SpectralField::zeros(g);
    for (i, t) in terms.iter().enumerate() {
        let n = i + 1;
        partial = partial.add(t);
        let ln_bound = if c_emp > 0.0 && u1_norm > 0.0 {
            (nu / c_emp).ln() + ln_big(&catalan[i]) + n as f64 * (c_emp * u1_norm / nu).ln()
        } else if n == 1 {
            u1_norm.ln()
        } else {
            f64::NEG_INFINITY
        };
        let partial_residual = match reference {
            Some(r) => Some(norm(&partial.sub(r), kind)?),
            None => None,
        };
        ledger_terms.push(OseenTerm {
            n,
            norm: norm(t, kind)?,
            catalan_bound: ln_bound.exp(),
            support_radius: support_radius(t),
            support_limit: n as f64 * step,
            partial_residual,
        });
    }
    Ok(OseenExpansion {
        ledger: OseenLedger {
            c_emp,
            contraction_radius: 4.0 * c_emp * u1_norm / nu,
            terms: ledger_terms,
        },
        terms,
        partial_sum: partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{build_force, ForceSpec, Orientation};
    use crate::spectral::GridSpec;

    #[test]
    fn first_term_is_the_viscous_resolvent() {
        let g = GridSpec::new(2.0, 16).unwrap();
        let p = PhysicalParams {
            nu: 0.7,
            alpha: 0.0,
            ell0: 1.0,
            length: 1.0,
            force: 0.01,
            rho1: 1.0,
            rho2: 2.0,
        };
        let f = build_force(
            &ForceSpec {
                params: p,
                orientation: Orientation::Uniform([1.0, 0.4, 0.2]),
            },
            &g,
        )
        .unwrap();
        let out = oseen_expand(&f, &p, 3, 1.0, None).unwrap();
        for idx in f.support(0.0) {
            let d = p.nu * g.xi_norm_sq(idx);
            for c in 0..3 {
                assert!((out.terms[0].comps[c][idx] * d - f.comps[c][idx]).norm() < 1e-15);
            }
        }
        for t in &out.ledger.terms {
            assert!(t.support_radius <= t.support_limit + 1e-12);
        }
        // kappa_max = 8.38 allows at most four terms of radius 2.
        let long = oseen_expand(&f, &p, 10, 1.0, None).unwrap();
        assert_eq!(long.terms.len(), 4);
    }
}
