//! Matrices of rational functions, with three rank notions:
//!
//! * `rank_at`: exact rank of the scalar matrix at one point;
//! * `exact_rank`: symbolic rank over the fraction field (fraction-free
//!   Bareiss elimination, certified);
//! * `generic_rank`: seeded randomized rank with a Schwartz-Zippel failure
//!   bound, the workhorse for large Jacobians.

use crate::error::CrError;
use crate::gauss::GaussRat;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::vars::VarContext;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RatFn>,
}

impl Matrix {
    pub fn from_ratfns(rows: usize, cols: usize, data: Vec<RatFn>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_polys(grid: Vec<Vec<Poly>>) -> Self {
        let rows = grid.len();
        let cols = grid.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows * cols);
        for r in grid {
            assert_eq!(r.len(), cols, "ragged matrix");
            for p in r {
                data.push(RatFn::from_poly(p));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &RatFn {
        &self.data[i * self.cols + j]
    }

    pub fn ctx(&self) -> Option<&Arc<VarContext>> {
        self.data.first().map(|f| f.ctx())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.at(i, j).clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Scalar matrix at a point; None if any entry has a pole there.
    pub fn evaluate(&self, point: &[GaussRat]) -> Option<Vec<Vec<GaussRat>>> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                row.push(self.at(i, j).evaluate(point)?);
            }
            out.push(row);
        }
        Some(out)
    }

    pub fn rank_at(&self, point: &[GaussRat]) -> Option<usize> {
        self.evaluate(point).map(scalar_rank)
    }

    /// Certified symbolic rank via fraction-free elimination.
    pub fn exact_rank(&self) -> usize {
        let (cleared, _) = self.clear_denominators();
        bareiss_rank(cleared).0
    }

    /// Certified symbolic determinant (square matrices).
    pub fn det_exact(&self) -> Result<RatFn, CrError> {
        if self.rows != self.cols {
            return Err(CrError::Internal("determinant of non-square matrix".into()));
        }
        if self.rows == 0 {
            let ctx = self.ctx().cloned();
            return match ctx {
                Some(c) => Ok(RatFn::one(&c)),
                None => Err(CrError::Internal("empty matrix without context".into())),
            };
        }
        let (cleared, row_factors) = self.clear_denominators();
        let det = bareiss_det(cleared);
        let mut denom = Poly::one(row_factors[0].ctx());
        for f in &row_factors {
            denom = denom.mul(f);
        }
        RatFn::new(det, denom)
    }

    /// Multiplies each row by the product of its denominators, returning
    /// the polynomial matrix and the per-row factors.
    fn clear_denominators(&self) -> (Vec<Vec<Poly>>, Vec<Poly>) {
        let ctx = self.ctx().expect("nonempty matrix").clone();
        let mut grid = Vec::with_capacity(self.rows);
        let mut factors = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut f = Poly::one(&ctx);
            for j in 0..self.cols {
                let d = self.at(i, j).den();
                if !(d.n_terms() == 1 && d.total_degree() == 0) {
                    f = f.mul(d);
                }
            }
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let e = self.at(i, j);
                let cleared = f.div_exact(e.den()).expect("row factor divisible").mul(e.num());
                row.push(cleared);
            }
            grid.push(row);
            factors.push(f);
        }
        (grid, factors)
    }

    /// Kernel basis over the fraction field, denominators cleared. Each
    /// vector is normalized so its first nonzero entry is monic.
    pub fn kernel(&self) -> Vec<Vec<Poly>> {
        let ctx = match self.ctx() {
            Some(c) => c.clone(),
            None => return Vec::new(),
        };
        // Row echelon over RatFn with deterministic pivoting.
        let mut m: Vec<Vec<RatFn>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0usize;
        for col in 0..self.cols {
            // Pick the unused row with the lowest-degree nonzero entry.
            let mut best: Option<(usize, u32)> = None;
            for (r, row) in m.iter().enumerate().skip(rank) {
                if !row[col].is_zero() {
                    let d = row[col].total_degree_bound();
                    if best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((r, d));
                    }
                }
            }
            let Some((r, _)) = best else { continue };
            m.swap(rank, r);
            let inv = RatFn::one(&ctx).div(&m[rank][col]).expect("nonzero pivot");
            for j in col..self.cols {
                m[rank][j] = m[rank][j].mul(&inv);
            }
            for i in 0..self.rows {
                if i != rank && !m[i][col].is_zero() {
                    let f = m[i][col].clone();
                    for j in col..self.cols {
                        let t = m[rank][j].mul(&f);
                        m[i][j] = m[i][j].sub(&t);
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        let free_cols: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free_cols {
            let mut v = vec![RatFn::zero(&ctx); self.cols];
            v[fc] = RatFn::one(&ctx);
            for (pi, &pc) in pivot_cols.iter().enumerate() {
                if pc < fc {
                    v[pc] = m[pi][fc].neg();
                }
            }
            basis.push(clear_vector(&ctx, &v));
        }
        basis
    }

    /// Randomized generic rank over integer boxes [-B, B] that double per
    /// trial. Deterministic in the seed; the bound is the Schwartz-Zippel
    /// failure probability that the reported rank is an undercount.
    pub fn generic_rank(&self, seed: u64, trials: u32) -> Result<GenericRank, CrError> {
        let ctx = self
            .ctx()
            .ok_or_else(|| CrError::Internal("generic rank of empty matrix".into()))?
            .clone();
        let nvars = ctx.len();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut best = 0usize;
        let mut bound = 1.0f64;
        let mut box_final = 0i64;
        let degree_bound: f64 = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j).total_degree_bound())
                    .max()
                    .unwrap_or(0) as f64
            })
            .sum();
        for t in 0..trials {
            let b: i64 = 16i64 << t.min(20);
            box_final = b;
            let mut found = None;
            for _attempt in 0..50 {
                let point: Vec<GaussRat> = (0..nvars)
                    .map(|_| {
                        GaussRat::from_ints(
                            rng.gen_range(-b..=b),
                            rng.gen_range(-b..=b),
                        )
                    })
                    .collect();
                if let Some(grid) = self.evaluate(&point) {
                    found = Some(scalar_rank(grid));
                    break;
                }
            }
            let r = found.ok_or_else(|| {
                CrError::SamplingFailed("all sampled points hit denominator zeros".into())
            })?;
            best = best.max(r);
            let values = ((2 * b + 1) as f64).powi(2);
            bound *= (degree_bound / values).min(1.0);
        }
        Ok(GenericRank { rank: best, trials, failure_bound: bound.min(1.0), box_final })
    }
}

/// Result of a randomized rank computation.
#[derive(Clone, Debug)]
pub struct GenericRank {
    pub rank: usize,
    pub trials: u32,
    /// Upper bound on P(true generic rank > reported rank).
    pub failure_bound: f64,
    pub box_final: i64,
}

/// Exact rank of a scalar matrix by Gaussian elimination over Q(i).
pub fn scalar_rank(mut m: Vec<Vec<GaussRat>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].inv();
        for j in col..cols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..rows {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..cols {
                    let t = &m[rank][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact kernel basis of a scalar matrix over Q(i). Each vector has its
/// first nonzero entry equal to 1.
pub fn scalar_kernel(mut m: Vec<Vec<GaussRat>>, cols: usize) -> Vec<Vec<GaussRat>> {
    let rows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].inv();
        for j in col..cols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..rows {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..cols {
                    let t = &m[rank][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![GaussRat::zero(); cols];
        v[free] = GaussRat::one();
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                v[col] = GaussRat::zero().sub(&m[r][free]);
            }
        }
        basis.push(v);
    }
    basis
}

/// Fraction-free Bareiss elimination; returns (rank, pivot rows, pivot cols).
fn bareiss_rank(mut m: Vec<Vec<Poly>>) -> (usize, Vec<usize>, Vec<usize>) {
    let rows = m.len();
    if rows == 0 {
        return (0, vec![], vec![]);
    }
    let cols = m[0].len();
    let ctx = m[0][0].ctx().clone();
    let mut prev = Poly::one(&ctx);
    let mut rank = 0usize;
    let mut row_perm: Vec<usize> = (0..rows).collect();
    let mut pivot_cols = Vec::new();
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        row_perm.swap(rank, p);
        let pivot = m[rank][col].clone();
        for i in (rank + 1)..rows {
            for j in (col + 1)..cols {
                let t = pivot.mul(&m[i][j]).sub(&m[rank][j].mul(&m[i][col]));
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][col] = Poly::zero(&ctx);
        }
        prev = pivot;
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, row_perm[..rank].to_vec(), pivot_cols)
}

/// Certified symbolic rank with the pivot rows/cols realizing it.
pub fn exact_rank_with_witness(grid: Vec<Vec<Poly>>) -> (usize, Vec<usize>, Vec<usize>) {
    bareiss_rank(grid)
}

/// Fraction-free determinant of a square polynomial matrix.
pub fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    assert!(n > 0 && m[0].len() == n);
    let ctx = m[0][0].ctx().clone();
    let mut prev = Poly::one(&ctx);
    let mut sign = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Poly::zero(&ctx);
        };
        if p != k {
            m.swap(k, p);
            sign = !sign;
        }
        let pivot = m[k][k].clone();
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t = pivot.mul(&m[i][j]).sub(&m[k][j].mul(&m[i][k]));
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

fn clear_vector(ctx: &Arc<VarContext>, v: &[RatFn]) -> Vec<Poly> {
    let mut d = Poly::one(ctx);
    for f in v {
        if !f.is_zero() {
            d = d.mul(f.den());
        }
    }
    let mut out: Vec<Poly> = v
        .iter()
        .map(|f| {
            if f.is_zero() {
                Poly::zero(ctx)
            } else {
                d.div_exact(f.den()).expect("common multiple").mul(f.num())
            }
        })
        .collect();
    // First nonzero entry monic, for a deterministic representative.
    if let Some(first) = out.iter().find(|p| !p.is_zero()) {
        let lc = first.lead_coeff_grlex();
        if !lc.is_one() {
            let inv = lc.inv();
            out = out.iter().map(|p| p.scale(&inv)).collect();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::vars::VarContext;

    #[test]
    fn symbolic_rank_one_example() {
        // [[z, z^2], [1, z]] has determinant 0 and rank 1.
        let ctx = VarContext::paired(1);
        let z = parse_poly("z1", &ctx).unwrap();
        let z2 = parse_poly("z1^2", &ctx).unwrap();
        let one = Poly::one(&ctx);
        let m = Matrix::from_polys(vec![vec![z.clone(), z2], vec![one, z]]);
        assert!(m.det_exact().unwrap().is_zero());
        assert_eq!(m.exact_rank(), 1);
        let gr = m.generic_rank(7, 3).unwrap();
        assert_eq!(gr.rank, 1);
    }

    #[test]
    fn generic_rank_matches_exact_on_full_rank() {
        let ctx = VarContext::paired(2);
        let z1 = parse_poly("z1", &ctx).unwrap();
        let z2 = parse_poly("z2", &ctx).unwrap();
        let one = Poly::one(&ctx);
        let zero = Poly::zero(&ctx);
        let m = Matrix::from_polys(vec![
            vec![z1.clone(), zero.clone()],
            vec![one, z2.mul(&z1)],
        ]);
        assert_eq!(m.exact_rank(), 2);
        assert_eq!(m.generic_rank(42, 3).unwrap().rank, 2);
    }

    #[test]
    fn kernel_of_whitney_jacobian_row() {
        // Row (x1 x3, -x2, x1^2/2) written with x_j = (z_j + zb_j)/2.
        let ctx = VarContext::paired(3);
        let x1 = crate::poly::re_part(&ctx, 0);
        let x2 = crate::poly::re_part(&ctx, 1);
        let x3 = crate::poly::re_part(&ctx, 2);
        let half = GaussRat::from_frac(1, 2);
        let row = vec![x1.mul(&x3), x2.neg(), x1.mul(&x1).scale(&half)];
        let m = Matrix::from_polys(vec![row.clone()]);
        let ker = m.kernel();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            let mut acc = Poly::zero(&ctx);
            for (c, e) in v.iter().zip(&row) {
                acc = acc.add(&c.mul(e));
            }
            assert!(acc.is_zero(), "kernel vector not annihilating");
        }
    }

    #[test]
    fn bareiss_det_three_by_three() {
        let ctx = VarContext::paired(1);
        let z = parse_poly("z1", &ctx).unwrap();
        let zb = parse_poly("zb1", &ctx).unwrap();
        let one = Poly::one(&ctx);
        let zero = Poly::zero(&ctx);
        // det [[z,1,0],[1,zb,1],[0,1,z]] = z^2 zb - 2z
        let m = vec![
            vec![z.clone(), one.clone(), zero.clone()],
            vec![one.clone(), zb.clone(), one.clone()],
            vec![zero.clone(), one.clone(), z.clone()],
        ];
        let det = bareiss_det(m);
        let want = parse_poly("z1^2*zb1 - 2*z1", &ctx).unwrap();
        assert_eq!(det, want);
    }
}
