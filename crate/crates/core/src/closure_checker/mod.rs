//! Formal exterior calculus on the 21-dimensional coframe bundle.
//!
//! The seven tautological 1-forms ωᵢ and fourteen connection 1-forms θ_a
//! are abstract basis elements; the torsion coordinates t₁..t₁₄ and the
//! ansatz parameters λ, μ are polynomial variables with exact rational
//! coefficients. The structure equations of the two-parameter quadratic
//! ansatz (C = 0, X = 0, H quadratic in T) are imposed as the definition of
//! d, and d² = 0 becomes a polynomial system in (λ, μ).

pub mod poly;
mod solve;

pub use poly::{Poly, LAM, MU, NVARS};
use poly::rat0;
pub use solve::solve_consistency;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::form::{Basis, Form};
use crate::rep_theory::{antisymmetrize_kl, curvature_ansatz_k, h_of_lambda, t4_index, Mat7c};
use crate::Rat;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Basis: w1..w7 then th1..th14.
pub fn bundle_basis() -> Arc<Basis> {
    let mut names: Vec<_> = (1..=7).map(|i| format!("w{i}")).collect();
    names.extend((1..=14).map(|a| format!("th{a}")));
    Basis::new(names)
}

/// The ansatz structure equations, with λ, μ either symbolic or specialized.
pub struct BundleSystem {
    pub basis: Arc<Basis>,
    /// Exact 𝔤₂-basis matrices B_a (7×7, rational, skew).
    pub b_mats: Vec<Vec<Vec<Rat>>>,
    /// Structure constants: [B_a, B_b] = Σ_c f[a][b][c] B_c.
    pub f_abc: Vec<Vec<Vec<Rat>>>,
    /// dωᵢ (degree 2).
    pub d_omega: Vec<Form<Poly>>,
    /// dtₐ (degree 1).
    pub d_t: Vec<Form<Poly>>,
    /// dθₐ (degree 2).
    pub d_theta: Vec<Form<Poly>>,
}

/// Exact coordinate map Λ²₁₄ → ℝ¹⁴: matrices skew-symmetric over ℚ[..]
/// are decomposed over the B_a; errors if the input is outside the span.
struct G2Coords {
    pairs: Vec<(u8, u8)>,
    /// 14×21 left inverse of the pair-coordinate matrix of the B_a.
    p: Vec<Vec<Rat>>,
    b_mats: Vec<Vec<Vec<Rat>>>,
}

impl G2Coords {
    fn build(ctx: &crate::rep_theory::G2Context) -> Result<G2Coords> {
        let pairs = ctx.pairs.clone();
        let np = pairs.len();
        let mut g = crate::exact::zeros(np, 14);
        for (a, vec_a) in ctx.g2_basis.iter().enumerate() {
            for (p, v) in vec_a.iter().enumerate() {
                g[p][a] = v.clone();
            }
        }
        let gt = crate::exact::transpose(&g);
        let gtg = crate::exact::matmul(&gt, &g);
        let p = crate::exact::solve_multi(&gtg, &gt)?;
        let mut b_mats = Vec::with_capacity(14);
        for vec_a in &ctx.g2_basis {
            let mut m = crate::exact::zeros(7, 7);
            for (pi, &(i, j)) in pairs.iter().enumerate() {
                m[i as usize][j as usize] = vec_a[pi].clone();
                m[j as usize][i as usize] = -&vec_a[pi];
            }
            b_mats.push(m);
        }
        Ok(G2Coords { pairs, p, b_mats })
    }

    /// Decompose a skew Poly matrix over the B_a, verifying exactness.
    fn coords(&self, m: &Mat7c<Poly>) -> Result<Vec<Poly>> {
        for i in 0..7 {
            for j in 0..7 {
                if !m[i][j].add(&m[j][i]).is_zero() {
                    return Err(Error::ExactInconsistent);
                }
            }
        }
        let mut out = vec![Poly::new(); 14];
        for (pi, &(i, j)) in self.pairs.iter().enumerate() {
            let v = &m[i as usize][j as usize];
            if v.is_zero() {
                continue;
            }
            for (a, row) in self.p.iter().enumerate() {
                if !row[pi].is_zero() {
                    out[a] = out[a].add(&v.scale_rat(&row[pi]));
                }
            }
        }
        // reconstruction must be exact: anything left over is outside 𝔤₂
        for &(i, j) in &self.pairs {
            let mut rec = Poly::new();
            for (a, c) in out.iter().enumerate() {
                let b = &self.b_mats[a][i as usize][j as usize];
                if !b.is_zero() {
                    rec = rec.add(&c.scale_rat(b));
                }
            }
            if rec != m[i as usize][j as usize] {
                return Err(Error::ExactInconsistent);
            }
        }
        Ok(out)
    }
}

fn poly_mat_t() -> Mat7c<Poly> {
    let ctx = crate::rep_theory::build_context();
    let mut t: Mat7c<Poly> = core::array::from_fn(|_| core::array::from_fn(|_| Poly::new()));
    for (a, vec_a) in ctx.g2_basis.iter().enumerate() {
        for (pi, &(i, j)) in ctx.pairs.iter().enumerate() {
            if vec_a[pi].is_zero() {
                continue;
            }
            let term = Poly::var(a).scale_rat(&vec_a[pi]);
            t[i as usize][j as usize] = t[i as usize][j as usize].add(&term);
            t[j as usize][i as usize] = t[j as usize][i as usize].sub(&term);
        }
    }
    t
}

/// Assemble the structure equations. `lambda`/`mu` may be `Poly::var(LAM)`
/// and `Poly::var(MU)` for the symbolic system, or constants.
pub fn build_system(lambda: &Poly, mu: &Poly) -> Result<BundleSystem> {
    let ctx = crate::rep_theory::build_context();
    let coords = G2Coords::build(&ctx)?;
    let basis = bundle_basis();
    let e3 = &ctx.consts.eps3;
    let t = poly_mat_t();

    // structure constants of the 𝔤₂ basis
    let mut f_abc = vec![vec![vec![rat0(); 14]; 14]; 14];
    for a in 0..14 {
        for b in 0..14 {
            let mut comm: Mat7c<Poly> =
                core::array::from_fn(|_| core::array::from_fn(|_| Poly::new()));
            for i in 0..7 {
                for j in 0..7 {
                    let mut s = rat0();
                    for k in 0..7 {
                        s = &s
                            + &(&(&coords.b_mats[a][i][k] * &coords.b_mats[b][k][j])
                                - &(&coords.b_mats[b][i][k] * &coords.b_mats[a][k][j]));
                    }
                    comm[i][j] = Poly::constant(s);
                }
            }
            let cs = coords.coords(&comm)?;
            for (c, p) in cs.into_iter().enumerate() {
                f_abc[a][b][c] = p.terms.get(&[0u8; NVARS]).cloned().unwrap_or_else(Rat::zero);
            }
        }
    }

    // dωᵢ = −θ_ij∧ωⱼ − ε_ijk T_kl ω_l∧ω_j
    let mut d_omega = Vec::with_capacity(7);
    for i in 0..7 {
        let mut f = Form::zero(basis.clone(), 2);
        for j in 0..7u8 {
            for a in 0..14 {
                let b = &coords.b_mats[a][i][j as usize];
                if !b.is_zero() {
                    f.add_term(&[7 + a as u8, j], Poly::constant(-b));
                }
            }
            for k in 0..7 {
                if e3[i][j as usize][k] == 0 {
                    continue;
                }
                for l in 0..7u8 {
                    let tkl = &t[k][l as usize];
                    if !tkl.is_zero() {
                        f.add_term(&[l, j], tkl.scale_rat(&crate::rat_i(-e3[i][j as usize][k])));
                    }
                }
            }
        }
        d_omega.push(f);
    }

    // dT_jk = [T, θ]_jk + nt_jkm ω_m with H = H(λ), C = X = 0
    let h = h_of_lambda(&t, lambda);
    let mut nt_coords: Vec<Vec<Poly>> = Vec::with_capacity(7); // [m][c]
    for m in 0..7 {
        let mut nt: Mat7c<Poly> = core::array::from_fn(|_| core::array::from_fn(|_| Poly::new()));
        for j in 0..7 {
            for k in 0..7 {
                let mut v = Poly::new();
                for l in 0..7 {
                    if e3[j][k][l] != 0 {
                        v = v.add(&h[l][m].scale_rat(&crate::rat_i(e3[j][k][l])));
                    }
                    if e3[k][m][l] != 0 {
                        v = v.add(&h[l][j].scale_rat(&crate::rat_i(3 * e3[k][m][l])));
                    }
                    if e3[m][j][l] != 0 {
                        v = v.add(&h[l][k].scale_rat(&crate::rat_i(3 * e3[m][j][l])));
                    }
                }
                nt[j][k] = v;
            }
        }
        nt_coords.push(coords.coords(&nt)?);
    }
    let mut d_t = Vec::with_capacity(14);
    for c in 0..14 {
        let mut f = Form::zero(basis.clone(), 1);
        for a in 0..14 {
            for b in 0..14 {
                if !f_abc[a][b][c].is_zero() {
                    f.add_term(&[7 + b as u8], Poly::var(a).scale_rat(&f_abc[a][b][c]));
                }
            }
        }
        for (m, row) in nt_coords.iter().enumerate() {
            f.add_term(&[m as u8], row[c].clone());
        }
        d_t.push(f);
    }

    // dθ_c = −(1/2) f_abc θ_a∧θ_b + K_c,kl ω_k∧ω_l (k < l)
    let k_tab = antisymmetrize_kl(&curvature_ansatz_k(e3, &ctx.consts.eps4, &t, lambda, mu));
    let mut d_theta = Vec::with_capacity(14);
    let mut k_coords: Vec<Vec<Vec<Poly>>> = Vec::with_capacity(7); // [k][l][c]
    for k in 0..7 {
        let mut row = Vec::with_capacity(7);
        for l in 0..7 {
            if l <= k {
                row.push(Vec::new());
                continue;
            }
            let mut km: Mat7c<Poly> =
                core::array::from_fn(|_| core::array::from_fn(|_| Poly::new()));
            for i in 0..7 {
                for j in 0..7 {
                    km[i][j] = k_tab[t4_index(i, j, k, l)].clone();
                }
            }
            row.push(coords.coords(&km)?);
        }
        k_coords.push(row);
    }
    let half = crate::rat(-1, 2);
    for c in 0..14 {
        let mut f = Form::zero(basis.clone(), 2);
        for a in 0..14 {
            for b in 0..14 {
                if !f_abc[a][b][c].is_zero() {
                    f.add_term(
                        &[7 + a as u8, 7 + b as u8],
                        Poly::constant(&half * &f_abc[a][b][c]),
                    );
                }
            }
        }
        for k in 0..7u8 {
            for l in (k + 1)..7u8 {
                let v = &k_coords[k as usize][l as usize][c];
                if !v.is_zero() {
                    f.add_term(&[k, l], v.clone());
                }
            }
        }
        d_theta.push(f);
    }

    Ok(BundleSystem { basis, b_mats: coords.b_mats, f_abc, d_omega, d_t, d_theta })
}

fn basis_monomial(sys: &BundleSystem, idx: &[u8]) -> Form<Poly> {
    let mut f = Form::zero(sys.basis.clone(), idx.len());
    f.add_term(idx, Poly::constant(crate::rat_i(1)));
    f
}

/// Merge `f` into `out` term by term (same basis and degree assumed).
fn accumulate(out: &mut Form<Poly>, f: &Form<Poly>) {
    for (idx, p) in &f.terms {
        if p.is_zero() {
            continue;
        }
        match out.terms.get_mut(idx) {
            Some(q) => {
                let s = q.add(p);
                if s.is_zero() {
                    out.terms.remove(idx);
                } else {
                    *q = s;
                }
            }
            None => {
                out.terms.insert(idx.clone(), p.clone());
            }
        }
    }
}

/// Graded Leibniz exterior derivative with the ansatz substitutions.
pub fn bundle_d(sys: &BundleSystem, f: &Form<Poly>) -> Result<Form<Poly>> {
    let mut out = Form::zero(sys.basis.clone(), f.degree + 1);
    for (idx, p) in &f.terms {
        // dP ∧ e_I via the chain rule through dtₐ
        for a in 0..14 {
            let dp = p.d_var(a);
            if dp.is_zero() {
                continue;
            }
            let term = sys.d_t[a].wedge(&basis_monomial(sys, idx))?.scale(&dp);
            accumulate(&mut out, &term);
        }
        // P · d(e_I), one slot at a time with alternating sign
        for (pos, &bi) in idx.iter().enumerate() {
            let dbi = if bi < 7 {
                &sys.d_omega[bi as usize]
            } else {
                &sys.d_theta[bi as usize - 7]
            };
            let mut term = basis_monomial(sys, &idx[..pos]).wedge(dbi)?;
            term = term.wedge(&basis_monomial(sys, &idx[pos + 1..]))?;
            let sign = if pos % 2 == 0 { p.clone() } else { p.neg() };
            accumulate(&mut out, &term.scale(&sign));
        }
    }
    Ok(out)
}

fn form_norm1(f: &Form<Poly>) -> Rat {
    let mut acc = rat0();
    for p in f.terms.values() {
        acc = &acc + &p.norm1();
    }
    acc
}

/// The three d²-residual families of the ansatz as polynomial forms.
pub fn closure_residual_forms(
    sys: &BundleSystem,
) -> Result<(Vec<Form<Poly>>, Vec<Form<Poly>>, Vec<Form<Poly>>)> {
    let mut r_omega = Vec::with_capacity(7);
    for i in 0..7 {
        r_omega.push(bundle_d(sys, &sys.d_omega[i])?);
    }
    let mut r_t = Vec::with_capacity(14);
    for a in 0..14 {
        r_t.push(bundle_d(sys, &sys.d_t[a])?);
    }
    let mut r_theta = Vec::with_capacity(14);
    for a in 0..14 {
        r_theta.push(bundle_d(sys, &sys.d_theta[a])?);
    }
    Ok((r_omega, r_t, r_theta))
}

/// Exact coefficient-norm of (d²ω, d²T, d²θ) at a specialized (λ, μ).
pub fn closure_residual(lambda: &Rat, mu: &Rat) -> Result<(Rat, Rat, Rat)> {
    let sys = build_system(&Poly::constant(lambda.clone()), &Poly::constant(mu.clone()))?;
    let (ro, rt, rth) = closure_residual_forms(&sys)?;
    let sum = |v: &[Form<Poly>]| v.iter().fold(rat0(), |acc, f| &acc + &form_norm1(f));
    Ok((sum(&ro), sum(&rt), sum(&rth)))
}

/// All (λ,μ)-coefficient constraints of the symbolic residual system,
/// grouped per t-monomial and form slot. Used by the consistency solve.
pub(crate) fn residual_constraints() -> Result<Vec<BTreeMap<(u8, u8), Rat>>> {
    let sys = build_system(&Poly::var(LAM), &Poly::var(MU))?;
    let (r_omega, r_t, r_theta) = closure_residual_forms(&sys)?;
    // d²ω must already vanish identically for symbolic (λ, μ)
    for f in &r_omega {
        if !f.is_zero() {
            return Err(Error::ExactInconsistent);
        }
    }
    let mut rows: Vec<BTreeMap<(u8, u8), Rat>> = Vec::new();
    for f in r_t.iter().chain(r_theta.iter()) {
        for p in f.terms.values() {
            // regroup: for each t-monomial, the (λ,μ)-polynomial it carries
            let mut per_t: BTreeMap<poly::Mono, BTreeMap<(u8, u8), Rat>> = BTreeMap::new();
            for (m, v) in &p.terms {
                let key = (m[LAM], m[MU]);
                let mut tm = *m;
                tm[LAM] = 0;
                tm[MU] = 0;
                per_t.entry(tm).or_default().insert(key, v.clone());
            }
            rows.extend(per_t.into_values());
        }
    }
    Ok(rows)
}
