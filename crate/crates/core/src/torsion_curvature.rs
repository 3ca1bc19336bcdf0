//! Torsion and curvature of the builtin models: the torsion 2-form and
//! tensor, the Levi-Civita connection over the anholonomic full basis, the
//! Riemann tensor with its scalar/traceless-Ricci/Weyl split, and the
//! residuals of the first- and second-order identities the models satisfy.

use crate::coframe_models::{exterior_derivative, InvariantModel};
use crate::error::{Error, Result};
use crate::form::{hodge_star, standard_basis, Form};
use crate::jet::Jet;
use crate::linsolve::lstsq;
use crate::rep_theory::{
    antisymmetrize_kl, curvature_ansatz_k, h_basis, h_of_lambda, orbit_invariant,
    project_lambda2, t4_index, G2Context, Mat7,
};
use alloc::vec;
use alloc::vec::Vec;

/// Levi-Civita connection data at a fixed radius. All 1-forms live over the
/// model's full basis so they can be differentiated again.
pub struct ConnectionSolution {
    /// ψ_{ij}, skew, solving dαᵢ + ψ_{ij}∧αⱼ = 0.
    pub psi: Vec<Vec<Form<Jet>>>,
    /// 𝔤₂-part θ_{ij} = ψ_{ij} − ε_{ijk}γ_k.
    pub theta: Vec<Vec<Form<Jet>>>,
    /// The V-part γ_k = (1/6)ε_{kab}ψ_{ab} (equals T_{kl}α_l on a closed
    /// structure).
    pub torsion_vector_part: Vec<Form<Jet>>,
    /// Relative residual of the first structure equation.
    pub residual: f64,
}

/// Riemann tensor in the orthonormal coframe, with its dimension-7
/// orthogonal decomposition.
pub struct CurvatureTensor {
    /// R_{ijkl}, flattened by [`t4_index`].
    pub riem: Vec<f64>,
    pub scal: f64,
    pub ric0: Mat7,
    /// Totally trace-free part, flattened like `riem`.
    pub weyl: Vec<f64>,
}

/// Relative residuals of the three structure equations at one (λ, μ).
pub struct StructureResiduals {
    pub d_omega: f64,
    pub d_t: f64,
    pub d_theta: f64,
}

fn rel(x: f64, scale: f64) -> f64 {
    x / scale.max(1e-30)
}

fn val_form(f: &Form<Jet>) -> Form<f64> {
    f.map(|c| c.val())
}

/// The torsion 2-form τ over the standard coframe basis: the unique element
/// of Λ²₁₄ with τ∧φ = d(∗φ). Coefficients carry radial jet channels.
pub fn torsion_two_form(ctx: &G2Context, model: &InvariantModel, r: f64) -> Result<Form<Jet>> {
    let frame = model.frame_at(r)?;
    let phi = crate::g2_core::assemble_phi(&frame.coframe)?;
    let dphi = exterior_derivative(model, &phi)?;
    if dphi.norm() > 1e-10 * phi.norm().max(1.0) {
        return Err(Error::Inconsistent { residual: dphi.norm() });
    }
    let star_phi = crate::g2_core::assemble_star_phi(&frame.coframe)?;
    let dsp = exterior_derivative(model, &star_phi)?;
    let dsp_c = frame.to_coframe(&dsp, 1e-9)?;

    // columns: B_a∧φ for the 14 exact 𝔤₂ basis 2-forms, rows: 5-form slots
    let phi_std: Form<f64> = crate::g2_core::phi_form(standard_basis());
    let mut slots: Vec<Vec<u8>> = Vec::with_capacity(21);
    for a5 in 0..7u8 {
        for b5 in 0..7u8 {
            if b5 > a5 {
                // complement of the pair (a5, b5) is a 5-subset
                slots.push((0..7u8).filter(|&x| x != a5 && x != b5).collect());
            }
        }
    }
    let mut a = vec![vec![Jet::ZERO; 14]; slots.len()];
    for (col, bvec) in ctx.g2_basis.iter().enumerate() {
        let mut b2 = Form::<f64>::zero(ctx.basis.clone(), 2);
        for (p, &(i, j)) in ctx.pairs.iter().enumerate() {
            b2.add_term(&[i, j], crate::coeff::rat_to_f64(&bvec[p]));
        }
        let img = b2.wedge(&phi_std)?;
        for (row, s) in slots.iter().enumerate() {
            a[row][col] = Jet::constant(img.coeff(s));
        }
    }
    let b: Vec<Jet> = slots.iter().map(|s| dsp_c.coeff(s)).collect();
    let sol = lstsq(&a, &b, 1e-12)?;
    let bnorm = b.iter().map(|x| x.abs_val()).fold(0.0f64, f64::max);
    if sol.residual > 1e-10 * bnorm.max(1.0) {
        return Err(Error::Inconsistent { residual: sol.residual });
    }
    let mut tau = Form::zero(standard_basis(), 2);
    for (col, x) in sol.x.iter().enumerate() {
        for (p, &(i, j)) in ctx.pairs.iter().enumerate() {
            let c = crate::coeff::rat_to_f64(&ctx.g2_basis[col][p]);
            if c != 0.0 {
                tau.add_term(&[i, j], x.scale(c));
            }
        }
    }
    Ok(tau)
}

/// T_{ij} = (1/6)·(coefficient of τ on the sorted pair), extended skew.
/// Rejects a Λ²₇ component above `tol` relative to ‖τ‖.
pub fn torsion_tensor(ctx: &G2Context, tau: &Form<Jet>, tol: f64) -> Result<Mat7> {
    let tv = val_form(tau);
    let (p7, _) = project_lambda2(ctx, &tv);
    if p7.norm() > tol * tv.norm().max(1e-30) && tv.norm() > 0.0 {
        return Err(Error::NotInG2 { defect: p7.norm() });
    }
    let mut t = [[0.0; 7]; 7];
    for (&(i, j), _) in ctx.pairs.iter().map(|p| (p, ())) {
        let c = tv.coeff(&[i, j]) / 6.0;
        t[i as usize][j as usize] = c;
        t[j as usize][i as usize] = -c;
    }
    Ok(t)
}

/// Scal = −9 T_{ij}T_{ij} = −(1/2)|τ|².
pub fn scalar_curvature_from_t(t: &Mat7) -> f64 {
    let mut s = 0.0;
    for row in t {
        for v in row {
            s += v * v;
        }
    }
    -9.0 * s
}

/// Solve the first structure equation dαᵢ + ψ_{ij}∧αⱼ = 0 for the unique
/// skew ψ over the full basis. The horizontal part comes from the
/// anholonomic Koszul formula on the coefficients of dαᵢ in the extended
/// basis; the vertical part is read off the ξ∧α components directly.
pub fn levi_civita_solve(model: &InvariantModel, r: f64) -> Result<ConnectionSolution> {
    let frame = model.frame_at(r)?;
    let nv = model.vertical.len();
    // C[i][p][q]: coefficient of dαᵢ on e_p∧e_q, antisymmetric in (p,q);
    // v[m][i][j]: coefficient of dαᵢ on e_j∧(vertical m) = −ξ_m∧e_j part.
    let mut c = vec![[[Jet::ZERO; 7]; 7]; 7];
    let mut v = vec![[[Jet::ZERO; 7]; 7]; nv];
    let mut scale = 0.0f64;
    let mut vert_vert = 0.0f64;
    for i in 0..7 {
        let d = exterior_derivative(model, &frame.coframe[i])?;
        let de = frame.to_extended(&d)?;
        scale = scale.max(de.max_abs());
        for (idx, co) in &de.terms {
            let (p, q) = (idx[0] as usize, idx[1] as usize);
            if q < 7 {
                c[i][p][q] = *co;
                c[i][q][p] = -*co;
            } else if p < 7 {
                v[q - 7][i][p] = *co;
            } else {
                vert_vert = vert_vert.max(co.abs_val());
            }
        }
    }
    if vert_vert > 1e-9 * scale.max(1.0) {
        return Err(Error::Inconsistent { residual: vert_vert });
    }
    // metric invariance makes the vertical part skew in (i,j); validate
    let mut vdefect = 0.0f64;
    for m in 0..nv {
        for i in 0..7 {
            for j in 0..7 {
                vdefect = vdefect.max((v[m][i][j] + v[m][j][i]).abs_val());
            }
        }
    }
    if vdefect > 1e-9 * scale.max(1.0) {
        return Err(Error::Inconsistent { residual: vdefect });
    }

    let mut psi: Vec<Vec<Form<Jet>>> = (0..7)
        .map(|_| (0..7).map(|_| Form::zero(model.basis.clone(), 1)).collect())
        .collect();
    for i in 0..7 {
        for j in 0..7 {
            if i == j {
                continue;
            }
            let mut f = Form::zero(model.basis.clone(), 1);
            for k in 0..7 {
                // Koszul: a_{ijk} = (1/2)(C_{ijk} + C_{jki} − C_{kij})
                let a = (c[i][j][k] + c[j][k][i] - c[k][i][j]).scale(0.5);
                f = f.add(&frame.coframe[k].scale(&a))?;
            }
            for (m, &vi) in model.vertical.iter().enumerate() {
                let w = (v[m][i][j] - v[m][j][i]).scale(0.5);
                f.add_term(&[vi], w);
            }
            psi[i][j] = f;
        }
    }

    // residual of the first structure equation, worst over i
    let mut worst = 0.0f64;
    for i in 0..7 {
        let mut lhs = exterior_derivative(model, &frame.coframe[i])?;
        for j in 0..7 {
            lhs = lhs.add(&psi[i][j].wedge(&frame.coframe[j])?)?;
        }
        worst = worst.max(rel(lhs.norm(), scale));
    }

    // split off the V-part: γ_k = (1/6)ε_{kab}ψ_{ab}
    let e3 = &crate::g2_core::build_g2_constants().eps3;
    let mut gamma: Vec<Form<Jet>> = Vec::with_capacity(7);
    for k in 0..7 {
        let mut g = Form::zero(model.basis.clone(), 1);
        for a in 0..7 {
            for b in 0..7 {
                if e3[k][a][b] != 0 {
                    g = g.add(&psi[a][b].scale(&Jet::constant(e3[k][a][b] as f64 / 6.0)))?;
                }
            }
        }
        gamma.push(g);
    }
    let mut theta: Vec<Vec<Form<Jet>>> = (0..7)
        .map(|_| (0..7).map(|_| Form::zero(model.basis.clone(), 1)).collect())
        .collect();
    for i in 0..7 {
        for j in 0..7 {
            let mut f = psi[i][j].clone();
            for k in 0..7 {
                if e3[i][j][k] != 0 {
                    f = f.sub(&gamma[k].scale(&Jet::constant(e3[i][j][k] as f64)))?;
                }
            }
            theta[i][j] = f;
        }
    }
    Ok(ConnectionSolution { psi, theta, torsion_vector_part: gamma, residual: worst })
}

/// Curvature 2-forms F_{ij} = dx_{ij} + x_{ik}∧x_{kj} of a connection table
/// over the model basis, re-expressed in the coframe basis (errors if not
/// horizontal to `tol` relative).
fn curvature_forms(
    model: &InvariantModel,
    r: f64,
    x: &[Vec<Form<Jet>>],
    tol: f64,
) -> Result<Vec<Vec<Form<f64>>>> {
    let frame = model.frame_at(r)?;
    let mut raw: Vec<Vec<Form<Jet>>> = Vec::with_capacity(7);
    let mut scale = 0.0f64;
    for i in 0..7 {
        let mut row = Vec::with_capacity(7);
        for j in 0..7 {
            let mut f = exterior_derivative(model, &x[i][j])?;
            for k in 0..7 {
                f = f.add(&x[i][k].wedge(&x[k][j])?)?;
            }
            scale = scale.max(f.max_abs());
            row.push(f);
        }
        raw.push(row);
    }
    // the vertical-component check is relative to the largest entry of the
    // whole table, not to each F_{ij} alone (F_{ii} cancels to noise)
    let mut out: Vec<Vec<Form<f64>>> = Vec::with_capacity(7);
    for (i, row) in raw.into_iter().enumerate() {
        let mut orow = Vec::with_capacity(7);
        for (j, f) in row.into_iter().enumerate() {
            let t = if f.max_abs() > 0.0 { tol * scale.max(1.0) / f.max_abs() } else { tol };
            orow.push(val_form(&frame.to_coframe(&f, t)?));
            let _ = (i, j);
        }
        out.push(orow);
    }
    Ok(out)
}

/// Kulkarni–Nomizu product of two symmetric matrices, flattened.
fn kulkarni_nomizu(a: &Mat7, b: &Mat7) -> Vec<f64> {
    let mut out = vec![0.0; 2401];
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                for l in 0..7 {
                    out[t4_index(i, j, k, l)] =
                        a[i][k] * b[j][l] - a[i][l] * b[j][k] + a[j][l] * b[i][k]
                            - a[j][k] * b[i][l];
                }
            }
        }
    }
    out
}

/// Riemann tensor via the second structure equation, with horizontality
/// check and the scalar/Ric⁰/Weyl split (n = 7).
pub fn riemann_tensor(model: &InvariantModel, r: f64) -> Result<CurvatureTensor> {
    let conn = levi_civita_solve(model, r)?;
    riemann_from_connection(model, r, &conn)
}

pub fn riemann_from_connection(
    model: &InvariantModel,
    r: f64,
    conn: &ConnectionSolution,
) -> Result<CurvatureTensor> {
    let f = curvature_forms(model, r, &conn.psi, 1e-9)?;
    let mut riem = vec![0.0; 2401];
    for i in 0..7 {
        for j in 0..7 {
            for (idx, co) in &f[i][j].terms {
                let (k, l) = (idx[0] as usize, idx[1] as usize);
                riem[t4_index(i, j, k, l)] = *co;
                riem[t4_index(i, j, l, k)] = -*co;
            }
        }
    }
    let mut ric = [[0.0; 7]; 7];
    for j in 0..7 {
        for l in 0..7 {
            let mut s = 0.0;
            for i in 0..7 {
                s += riem[t4_index(i, j, i, l)];
            }
            ric[j][l] = s;
        }
    }
    let scal: f64 = (0..7).map(|j| ric[j][j]).sum();
    let mut ric0 = ric;
    for (j, row) in ric0.iter_mut().enumerate() {
        row[j] -= scal / 7.0;
    }
    let mut delta = [[0.0; 7]; 7];
    for (i, row) in delta.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let kn_r = kulkarni_nomizu(&ric0, &delta);
    let kn_d = kulkarni_nomizu(&delta, &delta);
    let mut weyl = riem.clone();
    for p in 0..2401 {
        weyl[p] -= kn_r[p] / 5.0 + scal / 84.0 * kn_d[p];
    }
    Ok(CurvatureTensor { riem, scal, ric0, weyl })
}

fn frob(m: &Mat7) -> f64 {
    libm::sqrt(m.iter().flatten().map(|v| v * v).sum())
}

fn table_norm(t: &[f64]) -> f64 {
    libm::sqrt(t.iter().map(|v| v * v).sum())
}

/// dτ pulled down to the coframe basis, as an f64 3-form.
fn d_tau_coframe(model: &InvariantModel, r: f64, tau: &Form<Jet>) -> Result<Form<f64>> {
    let frame = model.frame_at(r)?;
    let mut tm = Form::zero(model.basis.clone(), 2);
    for (idx, co) in &tau.terms {
        let w = frame.coframe[idx[0] as usize].wedge(&frame.coframe[idx[1] as usize])?;
        tm = tm.add(&w.scale(co))?;
    }
    let dt = exterior_derivative(model, &tm)?;
    Ok(val_form(&frame.to_coframe(&dt, 1e-8)?))
}

/// The 3-form ε_{ikl}M_{ij}ω_j∧ω_k∧ω_l of a symmetric matrix M.
fn eps_contraction_form(ctx: &G2Context, m: &Mat7) -> Form<f64> {
    let e3 = &ctx.consts.eps3;
    let mut f = Form::zero(standard_basis(), 3);
    for i in 0..7 {
        for j in 0..7u8 {
            if m[i][j as usize] == 0.0 {
                continue;
            }
            for k in 0..7u8 {
                for l in 0..7u8 {
                    let e = e3[i][k as usize][l as usize];
                    if e != 0 {
                        f.add_term(&[j, k, l], e as f64 * m[i][j as usize]);
                    }
                }
            }
        }
    }
    f
}

/// The trace-free part of H, extracted from the curl of the torsion and
/// cross-checked against the traceless Ricci route.
///
/// dτ lands in the 1 ⊕ 27 summand of Λ³; the 27-channel satisfies
/// π₂₇ dτ = ε_{ikl}(21H − 3T²)₀_{ij} ω_j∧ω_k∧ω_l, while the φ-channel
/// carries an independent quadratic invariant of τ and is discarded.
pub fn extract_h(ctx: &G2Context, model: &InvariantModel, r: f64) -> Result<Mat7> {
    let tau = torsion_two_form(ctx, model, r)?;
    let t = torsion_tensor(ctx, &tau, 1e-8)?;
    let dtau = d_tau_coframe(model, r, &tau)?;
    let mut t2 = [[0.0; 7]; 7];
    let mut tr = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let mut s = 0.0;
            for mm in 0..7 {
                s += t[i][mm] * t[mm][j];
            }
            t2[i][j] = s;
        }
        tr += t2[i][i];
    }
    let mut t20 = t2;
    for (i, row) in t20.iter_mut().enumerate() {
        row[i] -= tr / 7.0;
    }
    // fit dτ over the symmetric image: 27 traceless directions + the trace
    let hb = h_basis();
    let mut a = vec![vec![Jet::ZERO; 28]; 35];
    for (col, b) in hb.iter().enumerate() {
        let f = eps_contraction_form(ctx, b);
        for (row, trp) in ctx.triples.iter().enumerate() {
            a[row][col] = Jet::constant(f.coeff(trp));
        }
    }
    let mut delta = [[0.0; 7]; 7];
    for (i, row) in delta.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let fd = eps_contraction_form(ctx, &delta);
    for (row, trp) in ctx.triples.iter().enumerate() {
        a[row][27] = Jet::constant(fd.coeff(trp));
    }
    let b: Vec<Jet> = ctx.triples.iter().map(|trp| Jet::constant(dtau.coeff(trp))).collect();
    let sol = lstsq(&a, &b, 1e-12)?;
    if sol.residual > 1e-8 * dtau.norm().max(1.0) {
        return Err(Error::Inconsistent { residual: sol.residual });
    }
    let mut m0 = [[0.0; 7]; 7];
    for (col, x) in sol.x.iter().take(27).enumerate() {
        let c = x.val();
        for i in 0..7 {
            for j in 0..7 {
                m0[i][j] += c * hb[col][i][j];
            }
        }
    }
    let mut h = [[0.0; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            h[i][j] = (m0[i][j] + 3.0 * t20[i][j]) / 21.0;
        }
    }
    // second route through the traceless Ricci
    let curv = riemann_tensor(model, r)?;
    let mut h2 = [[0.0; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            h2[i][j] = -(curv.ric0[i][j] + 12.0 * t20[i][j]) / 42.0;
        }
    }
    let mut diff = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            diff = diff.max(libm::fabs(h[i][j] - h2[i][j]));
        }
    }
    if diff > 1e-7 * (1.0 + frob(&h)) {
        return Err(Error::Inconsistent { residual: diff });
    }
    Ok(h)
}

/// Residuals of the three structure equations of the (λ, μ) ansatz.
pub fn structure_equation_residuals(
    ctx: &G2Context,
    model: &InvariantModel,
    r: f64,
    lambda: f64,
    mu: f64,
) -> Result<StructureResiduals> {
    let frame = model.frame_at(r)?;
    let conn = levi_civita_solve(model, r)?;
    let tau = torsion_two_form(ctx, model, r)?;
    let tj = torsion_jet_matrix(ctx, &tau);
    let t = torsion_tensor(ctx, &tau, 1e-8)?;
    let e3 = &ctx.consts.eps3;

    // (a) dωᵢ + (θ_{ij} + ε_{ijk}T_{kl}α_l)∧ωⱼ = 0, with T from the τ route
    let mut worst_a = 0.0f64;
    let mut scale_a = 0.0f64;
    for i in 0..7 {
        let mut lhs = exterior_derivative(model, &frame.coframe[i])?;
        let mut scale = lhs.norm();
        for j in 0..7 {
            let mut p = conn.theta[i][j].clone();
            for k in 0..7 {
                if e3[i][j][k] == 0 {
                    continue;
                }
                for l in 0..7 {
                    if t[k][l] != 0.0 {
                        let co = Jet::constant(e3[i][j][k] as f64 * t[k][l]);
                        p = p.add(&frame.coframe[l].scale(&co))?;
                    }
                }
            }
            let term = p.wedge(&frame.coframe[j])?;
            scale = scale.max(term.norm());
            lhs = lhs.add(&term)?;
        }
        worst_a = worst_a.max(lhs.norm());
        scale_a = scale_a.max(scale);
    }
    let d_omega = rel(worst_a, scale_a);

    // (b) dT + [T, θ] against the ∇T pattern of the ansatz (C = X = 0)
    let h = h_of_lambda(&t, &lambda);
    let nt = crate::rep_theory::assemble_nabla_t(&ctx.consts, &[0.0; 343], &h, &[0.0; 7]);
    let mut d_t = 0.0f64;
    {
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for j in 0..7 {
            for k in 0..7 {
                let mut lhs = Form::one_form(model.basis.clone(), 0, tj[j][k].deriv());
                for l in 0..7 {
                    let a = conn.theta[l][k].scale(&tj[j][l]);
                    let b = conn.theta[l][j].scale(&tj[k][l]);
                    lhs = lhs.add(&b.sub(&a)?)?;
                }
                let mut rhs = Form::zero(model.basis.clone(), 1);
                for m in 0..7 {
                    let co = nt[(j * 7 + k) * 7 + m];
                    if co != 0.0 {
                        rhs = rhs.add(&frame.coframe[m].scale(&Jet::constant(co)))?;
                    }
                }
                scale = scale.max(lhs.norm()).max(rhs.norm());
                worst = worst.max(lhs.sub(&rhs)?.norm());
            }
        }
        d_t = d_t.max(rel(worst, scale));
    }

    // (c) dθ + θ∧θ against the curvature ansatz K(T, λ, μ)
    let fth = curvature_forms(model, r, &conn.theta, 1e-7)?;
    let k_tab = antisymmetrize_kl(&curvature_ansatz_k(
        &ctx.consts.eps3,
        &ctx.consts.eps4,
        &t,
        &lambda,
        &mu,
    ));
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            for &(k, l) in &ctx.pairs {
                let lhs = fth[i][j].coeff(&[k, l]);
                let rhs = k_tab[t4_index(i, j, k as usize, l as usize)];
                scale = scale.max(libm::fabs(lhs)).max(libm::fabs(rhs));
                worst = worst.max(libm::fabs(lhs - rhs));
            }
        }
    }
    let d_theta = rel(worst, scale);
    Ok(StructureResiduals { d_omega, d_t, d_theta })
}

fn torsion_jet_matrix(ctx: &G2Context, tau: &Form<Jet>) -> [[Jet; 7]; 7] {
    let mut t = [[Jet::ZERO; 7]; 7];
    for &(i, j) in &ctx.pairs {
        let c = tau.coeff(&[i, j]).scale(1.0 / 6.0);
        t[i as usize][j as usize] = c;
        t[j as usize][i as usize] = -c;
    }
    t
}

/// ∇T assembled numerically from dT + [T, θ] along the coframe, flattened
/// nt_{ijk} with k the covariant index. Used for the X-vanishing check.
pub fn nabla_t_numeric(ctx: &G2Context, model: &InvariantModel, r: f64) -> Result<[f64; 343]> {
    let frame = model.frame_at(r)?;
    let conn = levi_civita_solve(model, r)?;
    let tau = torsion_two_form(ctx, model, r)?;
    let tj = torsion_jet_matrix(ctx, &tau);
    let mut nt = [0.0; 343];
    for i in 0..7 {
        for j in 0..7 {
            let mut f = Form::one_form(model.basis.clone(), 0, tj[i][j].deriv());
            for l in 0..7 {
                let a = conn.theta[l][j].scale(&tj[i][l]);
                let b = conn.theta[l][i].scale(&tj[j][l]);
                f = f.add(&b.sub(&a)?)?;
            }
            let fc = val_form(&frame.to_coframe(&f, 1e-7)?);
            for k in 0..7u8 {
                nt[(i * 7 + j) * 7 + k as usize] = fc.coeff(&[k]);
            }
        }
    }
    Ok(nt)
}

/// Relative norm of dτ − (1/7)|τ|²φ − λ((1/7)|τ|²φ + ∗(τ∧τ)).
pub fn lambda_quadratic_residual(
    ctx: &G2Context,
    model: &InvariantModel,
    r: f64,
    lambda: f64,
) -> Result<f64> {
    let tau = torsion_two_form(ctx, model, r)?;
    let dtau = d_tau_coframe(model, r, &tau)?;
    let tv = val_form(&tau);
    let tau_sq = tv.norm_sq();
    let phi: Form<f64> = crate::g2_core::phi_form(standard_basis());
    let star_tt = hodge_star(&tv.wedge(&tv)?)?;
    let rhs = phi
        .scale(&((1.0 + lambda) * tau_sq / 7.0))
        .add(&star_tt.scale(&lambda))?;
    let scale = dtau.norm().max(rhs.norm());
    Ok(rel(dtau.sub(&rhs)?.norm(), scale))
}

/// ‖Weyl‖ / max(‖Riem‖, ε).
pub fn conformal_flatness_residual(model: &InvariantModel, r: f64) -> Result<f64> {
    let c = riemann_tensor(model, r)?;
    Ok(table_norm(&c.weyl) / table_norm(&c.riem).max(1e-30))
}

/// One point of the adjoint-orbit curve of the torsion tensor.
pub struct OrbitPoint {
    pub r: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// (x−y)(x+2y)(2x+y) on (x, y) = (T₂₃, T₄₅); the τ-coefficient reading
    /// is 216 times larger.
    pub cubic: f64,
}

pub fn orbit_curve(
    ctx: &G2Context,
    model: &InvariantModel,
    samples: &[f64],
) -> Result<Vec<OrbitPoint>> {
    let mut out = Vec::with_capacity(samples.len());
    for &r in samples {
        let tau = torsion_two_form(ctx, model, r)?;
        let t = torsion_tensor(ctx, &tau, 1e-8)?;
        let (mu1, mu2) = orbit_invariant(&ctx.consts, &t, 1e-6)?;
        let (x, y) = (t[1][2], t[3][4]);
        let cubic = (x - y) * (x + 2.0 * y) * (2.0 * x + y);
        out.push(OrbitPoint { r, mu1, mu2, cubic });
    }
    Ok(out)
}
