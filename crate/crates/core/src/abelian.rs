//! Abelianization through the integer Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::model::Presentation;

/// Exponent sums: one row per relator, one column per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    pub cols: usize,
    pub rows: Vec<Vec<i64>>,
}

pub fn relation_matrix(p: &Presentation) -> RelationMatrix {
    let cols = p.n() as usize;
    let rows = p
        .relators()
        .iter()
        .map(|r| {
            let mut row = vec![0i64; cols];
            for l in r.letters() {
                row[l.generator() as usize - 1] += l.sign();
            }
            row
        })
        .collect();
    RelationMatrix { cols, rows }
}

/// Diagonal of the Smith normal form, `min(rows, cols)` entries, each
/// dividing the next, zeros last.
pub fn smith_normal_form(rows: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let r = m.len();
    let k = r.min(cols);
    for t in 0..k {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..cols {
                    if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(m, k);
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..r {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&pivot);
                for j in t..cols {
                    let v = &m[t][j] * &q;
                    m[i][j] -= v;
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&pivot);
                for i in t..r {
                    let v = &m[i][t] * &q;
                    m[i][j] -= v;
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // Pivot must divide the rest of the block; otherwise fold a row in.
            let bad = (t + 1..r).find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
    }
    finish(m, k)
}

fn finish(m: Vec<Vec<BigInt>>, k: usize) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = (0..k).map(|i| m[i][i].abs()).collect();
    for i in 0..k {
        for j in i + 1..k {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    #[serde(serialize_with = "decimal_strings")]
    pub torsion: Vec<BigInt>,
}

fn decimal_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|d| d.to_string()))
}

impl AbelianInvariants {
    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Finite cyclic of the given order.
    pub fn is_cyclic_of_order(&self, order: u32) -> bool {
        self.free_rank == 0 && self.torsion == [BigInt::from(order)]
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

pub fn abelian_invariants(p: &Presentation) -> AbelianInvariants {
    invariants_of(&relation_matrix(p))
}

pub fn invariants_of(m: &RelationMatrix) -> AbelianInvariants {
    let basis = match echelon_basis(m) {
        Some(b) => b.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect(),
        None => m.rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>(),
    };
    let diag = smith_normal_form(&basis, m.cols);
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    AbelianInvariants {
        free_rank: m.cols - nonzero,
        torsion: diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect(),
    }
}

/// Row lattice in echelon form with at most `cols` rows, so the Smith
/// reduction runs on a square-sized matrix. `None` on i128 overflow.
///
/// The basis is kept in reduced Hermite form. Once the lattice has small
/// index most pivots are 1 and their rows are sparse, so each further
/// relator costs little more than its own support.
fn echelon_basis(m: &RelationMatrix) -> Option<Vec<Vec<i128>>> {
    let cols = m.cols;
    let mut pivots: Vec<Option<Vec<i128>>> = vec![None; cols];
    let mut support: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for row in &m.rows {
        let mut v: Vec<i128> = row.iter().map(|&x| x as i128).collect();
        let mut changed = false;
        for c in 0..cols {
            if v[c] == 0 {
                continue;
            }
            match pivots[c].take() {
                None => {
                    pivots[c] = Some(v);
                    changed = true;
                    break;
                }
                Some(b) if v[c] % b[c] == 0 => {
                    let q = v[c] / b[c];
                    for &j in &support[c] {
                        v[j] = v[j].checked_sub(q.checked_mul(b[j])?)?;
                    }
                    pivots[c] = Some(b);
                }
                Some(b) => {
                    let (g, x, y) = ext_gcd(b[c], v[c]);
                    let (bc, vc) = (b[c] / g, v[c] / g);
                    let mut nb = vec![0i128; cols];
                    let mut nv = vec![0i128; cols];
                    for j in c..cols {
                        nb[j] = x.checked_mul(b[j])?.checked_add(y.checked_mul(v[j])?)?;
                        nv[j] = vc.checked_mul(b[j])?.checked_sub(bc.checked_mul(v[j])?)?;
                    }
                    pivots[c] = Some(nb);
                    v = nv;
                    changed = true;
                }
            }
        }
        if changed {
            hermite_reduce(&mut pivots)?;
            for (c, p) in pivots.iter().enumerate() {
                support[c] = p.as_ref().map_or(Vec::new(), |b| (c..cols).filter(|&j| b[j] != 0).collect());
            }
        }
    }
    Some(pivots.into_iter().flatten().collect())
}

/// Positive pivots, and entries above each pivot reduced into `[0, pivot)`.
fn hermite_reduce(pivots: &mut [Option<Vec<i128>>]) -> Option<()> {
    let cols = pivots.len();
    for c in 0..cols {
        let Some(mut b) = pivots[c].take() else { continue };
        if b[c] < 0 {
            for x in &mut b[c..] {
                *x = -*x;
            }
        }
        for r in 0..c {
            let Some(a) = pivots[r].as_mut() else { continue };
            let q = a[c].div_euclid(b[c]);
            if q != 0 {
                for j in c..cols {
                    a[j] = a[j].checked_sub(q.checked_mul(b[j])?)?;
                }
            }
        }
        pivots[c] = Some(b);
    }
    Some(())
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i128, 0i128, 0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}
