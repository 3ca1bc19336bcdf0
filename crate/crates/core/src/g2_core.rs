//! ε-symbol tables, the standard 3-form and 4-form, and helpers built on the
//! generic exterior-algebra kernel in [`crate::form`].

use crate::coeff::Coeff;
use crate::error::Result;
use crate::form::{standard_basis, Form};
use crate::Rat;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// The seven oriented triples of the standard 3-form
/// φ = e¹²³ + e¹⁴⁵ + e¹⁶⁷ + e²⁴⁶ − e²⁵⁷ − e³⁴⁷ − e³⁵⁶ (1-based).
pub const PHI_TRIPLES: [([u8; 3], i64); 7] = [
    ([1, 2, 3], 1),
    ([1, 4, 5], 1),
    ([1, 6, 7], 1),
    ([2, 4, 6], 1),
    ([2, 5, 7], -1),
    ([3, 4, 7], -1),
    ([3, 5, 6], -1),
];

/// The seven oriented quadruples of
/// ∗φ = e⁴⁵⁶⁷ + e²³⁶⁷ + e²³⁴⁵ + e¹³⁵⁷ − e¹³⁴⁶ − e¹²⁵⁶ − e¹²⁴⁷ (1-based).
pub const STAR_PHI_QUADS: [([u8; 4], i64); 7] = [
    ([4, 5, 6, 7], 1),
    ([2, 3, 6, 7], 1),
    ([2, 3, 4, 5], 1),
    ([1, 3, 5, 7], 1),
    ([1, 3, 4, 6], -1),
    ([1, 2, 5, 6], -1),
    ([1, 2, 4, 7], -1),
];

pub type Eps3 = [[[i64; 7]; 7]; 7];
pub type Eps4 = [[[[i64; 7]; 7]; 7]; 7];

/// Integer ε tables and the standard forms over the `e1..e7` basis.
pub struct G2Constants {
    pub eps3: Eps3,
    pub eps4: Eps4,
    pub phi: Form<Rat>,
    pub star_phi: Form<Rat>,
}

fn perm_sign(idx: &[u8]) -> i64 {
    crate::form::sort_index(idx).map(|(_, s)| s).unwrap_or(0)
}

/// Build the ε tables and standard forms. Pure and deterministic.
pub fn build_g2_constants() -> G2Constants {
    let mut eps3: Eps3 = [[[0; 7]; 7]; 7];
    for (t, s) in PHI_TRIPLES {
        for i in 0..7u8 {
            for j in 0..7u8 {
                for k in 0..7u8 {
                    let idx = [i + 1, j + 1, k + 1];
                    let mut sorted = idx;
                    sorted.sort_unstable();
                    if sorted == t {
                        eps3[i as usize][j as usize][k as usize] = s * perm_sign(&idx);
                    }
                }
            }
        }
    }
    let mut eps4: Eps4 = [[[[0; 7]; 7]; 7]; 7];
    for (q, s) in STAR_PHI_QUADS {
        for i in 0..7u8 {
            for j in 0..7u8 {
                for k in 0..7u8 {
                    for l in 0..7u8 {
                        let idx = [i + 1, j + 1, k + 1, l + 1];
                        let mut sorted = idx;
                        sorted.sort_unstable();
                        if sorted == q {
                            eps4[i as usize][j as usize][k as usize][l as usize] =
                                s * perm_sign(&idx);
                        }
                    }
                }
            }
        }
    }
    let basis = standard_basis();
    G2Constants {
        eps3,
        eps4,
        phi: phi_form::<Rat>(basis.clone()),
        star_phi: star_phi_form::<Rat>(basis),
    }
}

/// The standard 3-form over a given 7-element basis (0-based indices).
pub fn phi_form<C: Coeff>(basis: Arc<crate::form::Basis>) -> Form<C> {
    let mut f = Form::zero(basis, 3);
    for (t, s) in PHI_TRIPLES {
        f.add_term(&[t[0] - 1, t[1] - 1, t[2] - 1], C::from_int(s));
    }
    f
}

/// The standard 4-form ∗φ over a given 7-element basis.
pub fn star_phi_form<C: Coeff>(basis: Arc<crate::form::Basis>) -> Form<C> {
    let mut f = Form::zero(basis, 4);
    for (q, s) in STAR_PHI_QUADS {
        f.add_term(&[q[0] - 1, q[1] - 1, q[2] - 1, q[3] - 1], C::from_int(s));
    }
    f
}

/// Assemble the φ-pattern 3-form from seven 1-forms (a coframe substituted
/// into the standard expansion).
pub fn assemble_phi<C: Coeff>(cof: &[Form<C>]) -> Result<Form<C>> {
    assemble_pattern(cof, PHI_TRIPLES.iter().map(|(t, s)| (&t[..], *s)))
}

/// Assemble the ∗φ-pattern 4-form from seven 1-forms.
pub fn assemble_star_phi<C: Coeff>(cof: &[Form<C>]) -> Result<Form<C>> {
    assemble_pattern(cof, STAR_PHI_QUADS.iter().map(|(q, s)| (&q[..], *s)))
}

fn assemble_pattern<'a, C: Coeff>(
    cof: &[Form<C>],
    pattern: impl Iterator<Item = (&'a [u8], i64)>,
) -> Result<Form<C>> {
    let mut acc: Option<Form<C>> = None;
    for (idx, s) in pattern {
        let mut w = cof[(idx[0] - 1) as usize].clone();
        for &i in &idx[1..] {
            w = w.wedge(&cof[(i - 1) as usize])?;
        }
        let w = w.scale(&C::from_int(s));
        acc = Some(match acc {
            Some(a) => a.add(&w)?,
            None => w,
        });
    }
    Ok(acc.expect("non-empty pattern"))
}

/// Exhaustive integer check of the four ε-contraction identities. Returns the
/// number of failing index combinations (0 on success).
pub fn check_eps_identities(c: &G2Constants) -> usize {
    let (e3, e4) = (&c.eps3, &c.eps4);
    let d = |a: usize, b: usize| if a == b { 1i64 } else { 0 };
    let mut failures = 0usize;

    // ε_ijk ε_ijl = 6 δ_kl
    for k in 0..7 {
        for l in 0..7 {
            let mut s = 0i64;
            for i in 0..7 {
                for j in 0..7 {
                    s += e3[i][j][k] * e3[i][j][l];
                }
            }
            if s != 6 * d(k, l) {
                failures += 1;
            }
        }
    }
    // ε_ijq ε_ijkl = 4 ε_qkl
    for q in 0..7 {
        for k in 0..7 {
            for l in 0..7 {
                let mut s = 0i64;
                for i in 0..7 {
                    for j in 0..7 {
                        s += e3[i][j][q] * e4[i][j][k][l];
                    }
                }
                if s != 4 * e3[q][k][l] {
                    failures += 1;
                }
            }
        }
    }
    // ε_ipq ε_ijk = ε_pqjk + δ_pj δ_qk − δ_pk δ_qj
    for p in 0..7 {
        for q in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut s = 0i64;
                    for i in 0..7 {
                        s += e3[i][p][q] * e3[i][j][k];
                    }
                    if s != e4[p][q][j][k] + d(p, j) * d(q, k) - d(p, k) * d(q, j) {
                        failures += 1;
                    }
                }
            }
        }
    }
    // ε_ipq ε_ijkl = δ_pj ε_qkl − δ_jq ε_pkl + δ_pk ε_jql − δ_kq ε_jpl
    //              + δ_pl ε_jkq − δ_lq ε_jkp
    for p in 0..7 {
        for q in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    for l in 0..7 {
                        let mut s = 0i64;
                        for i in 0..7 {
                            s += e3[i][p][q] * e4[i][j][k][l];
                        }
                        let rhs = d(p, j) * e3[q][k][l] - d(j, q) * e3[p][k][l]
                            + d(p, k) * e3[j][q][l]
                            - d(k, q) * e3[j][p][l]
                            + d(p, l) * e3[j][k][q]
                            - d(l, q) * e3[j][k][p];
                        if s != rhs {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    failures
}

/// Number of nonzero entries of the ε₃ table.
pub fn eps3_nonzero_count(c: &G2Constants) -> usize {
    let mut n = 0;
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                if c.eps3[i][j][k] != 0 {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Rebuild ε₄ from the identity ε_ipq ε_ijk = ε_pqjk + δ_pj δ_qk − δ_pk δ_qj
/// and report entries disagreeing with the table built from ∗φ.
pub fn eps4_cross_validate(c: &G2Constants) -> usize {
    let d = |a: usize, b: usize| if a == b { 1i64 } else { 0 };
    let mut mismatches = 0;
    for p in 0..7 {
        for q in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut s = 0i64;
                    for i in 0..7 {
                        s += c.eps3[i][p][q] * c.eps3[i][j][k];
                    }
                    let forced = s - d(p, j) * d(q, k) + d(p, k) * d(q, j);
                    if forced != c.eps4[p][q][j][k] {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    mismatches
}

/// 1-based lookup helpers used by tests and by the CLI.
impl G2Constants {
    pub fn eps3_at(&self, i: usize, j: usize, k: usize) -> i64 {
        self.eps3[i - 1][j - 1][k - 1]
    }
    pub fn eps4_at(&self, i: usize, j: usize, k: usize, l: usize) -> i64 {
        self.eps4[i - 1][j - 1][k - 1][l - 1]
    }
}

/// Build the torsion 2-form τ = 6 Σ_{i<j} T_ij ωi∧ωj from a matrix over any
/// coefficient ring (the τ̃ = 3 T_ij ωi∧ωj convention summed over ordered
/// pairs).
pub fn two_form_from_matrix<C: Coeff>(
    basis: Arc<crate::form::Basis>,
    t: &[[C; 7]; 7],
    scale: i64,
) -> Form<C> {
    let mut f = Form::zero(basis, 2);
    let s = C::from_int(scale);
    for i in 0..7u8 {
        for j in (i + 1)..7u8 {
            f.add_term(&[i, j], t[i as usize][j as usize].mul(&s));
        }
    }
    f
}

/// Matrix coefficients of a 2-form: M_ij = coefficient on sorted (i<j),
/// extended antisymmetrically, divided by `div`.
pub fn matrix_from_two_form(f: &Form<f64>, div: f64) -> [[f64; 7]; 7] {
    let mut t = [[0.0; 7]; 7];
    for (k, c) in &f.terms {
        let (i, j) = (k[0] as usize, k[1] as usize);
        t[i][j] = c / div;
        t[j][i] = -c / div;
    }
    t
}

/// Collect the 7 coframe 1-forms of the standard basis.
pub fn standard_coframe<C: Coeff>(basis: Arc<crate::form::Basis>) -> Vec<Form<C>> {
    (0..7u8).map(|i| Form::one_form(basis.clone(), i, C::from_int(1))).collect()
}
