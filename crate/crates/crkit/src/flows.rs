//! Floating-point integration of polynomial vector-field flows and the
//! concatenated-flow rank estimate for orbit dimensions. Cross-validates
//! the symbolic Lie-saturation ranks.

use crate::cr_fields::VectorField;
use crate::error::{CrError, Result};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug)]
pub struct FlowConfig {
    /// RK4 step length in t-units.
    pub h: f64,
    /// Maximal |t_j| drawn for concatenated words.
    pub delta: f64,
    /// Word-length cap; 0 means 3·(state dimension).
    pub k_max: usize,
    /// Relative singular-value threshold for rank decisions.
    pub svd_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        // delta must be large enough that deep bracket directions (order
        // 6 on the built-in examples) rise above svd_tol; diverging draws
        // shrink it again per word.
        FlowConfig { h: 1e-3, delta: 1.0, k_max: 0, svd_tol: 1e-6 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h <= 0.0 || self.delta <= 0.0 || self.svd_tol <= 0.0 {
            return Err(CrError::BadInput(
                "flow config needs positive h, delta, svd_tol".into(),
            ));
        }
        Ok(())
    }
}

const DIVERGENCE_NORM: f64 = 1e6;

fn eval_field(x: &VectorField, state: &[C64]) -> Vec<C64> {
    let point: Vec<(f64, f64)> = state.iter().map(|c| (c.re, c.im)).collect();
    x.coeffs
        .iter()
        .map(|c| {
            let (re, im) = c.evaluate_f64(&point);
            C64::new(re, im)
        })
        .collect()
}

/// exp(t X)(p) by RK4 along the straight segment from 0 to t.
pub fn flow(x: &VectorField, p: &[C64], t: C64, cfg: &FlowConfig) -> Result<Vec<C64>> {
    cfg.validate()?;
    let l = x.coeffs.len();
    if p.len() != l {
        return Err(CrError::BadInput(format!(
            "state has {} coordinates, field acts on {}",
            p.len(),
            l
        )));
    }
    let dist = t.norm();
    if dist == 0.0 {
        return Ok(p.to_vec());
    }
    let steps = (dist / cfg.h).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut state = p.to_vec();
    let deriv = |s: &[C64]| -> Vec<C64> { eval_field(x, s) };
    for _ in 0..steps {
        let k1 = deriv(&state);
        let s2: Vec<C64> = state.iter().zip(&k1).map(|(s, k)| s + dt * k * 0.5).collect();
        let k2 = deriv(&s2);
        let s3: Vec<C64> = state.iter().zip(&k2).map(|(s, k)| s + dt * k * 0.5).collect();
        let k3 = deriv(&s3);
        let s4: Vec<C64> = state.iter().zip(&k3).map(|(s, k)| s + dt * k).collect();
        let k4 = deriv(&s4);
        for (j, s) in state.iter_mut().enumerate() {
            *s += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > DIVERGENCE_NORM {
            return Err(CrError::Diverged(format!(
                "trajectory norm {:.3e} exceeded {:.0e}",
                norm, DIVERGENCE_NORM
            )));
        }
    }
    Ok(state)
}

/// Γ_word(t_1..t_k) = φ_{w_k,t_k} ∘ … ∘ φ_{w_1,t_1}(p).
fn concatenated(
    fields: &[VectorField],
    word: &[usize],
    times: &[C64],
    p: &[C64],
    cfg: &FlowConfig,
) -> Result<Vec<C64>> {
    let mut state = p.to_vec();
    for (j, &fi) in word.iter().enumerate() {
        state = flow(&fields[fi], &state, times[j], cfg)?;
    }
    Ok(state)
}

fn svd_rank(mat: DMatrix<C64>, tol: f64) -> usize {
    let svd = mat.svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * max).count()
}

/// Rank of dΓ/dt at one random draw for one word, central differences.
fn word_rank(
    fields: &[VectorField],
    word: &[usize],
    p: &[C64],
    cfg: &FlowConfig,
    rng: &mut ChaCha12Rng,
) -> Result<usize> {
    let k = word.len();
    let l = p.len();
    let times: Vec<C64> = (0..k)
        .map(|_| {
            C64::new(
                rng.gen_range(-cfg.delta..cfg.delta),
                rng.gen_range(-cfg.delta..cfg.delta),
            ) * 0.5
        })
        .collect();
    let eps = 1e-5;
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let mut tp = times.clone();
        tp[j] += C64::new(eps, 0.0);
        let mut tm = times.clone();
        tm[j] -= C64::new(eps, 0.0);
        let fp = concatenated(fields, word, &tp, p, cfg)?;
        let fm = concatenated(fields, word, &tm, p, cfg)?;
        let col: Vec<C64> = fp
            .iter()
            .zip(&fm)
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        cols.push(col);
    }
    let mat = DMatrix::from_fn(l, k, |r, c| cols[c][r]);
    Ok(svd_rank(mat, cfg.svd_tol))
}

/// The stabilized maximal rank e_p of concatenated flow maps over words
/// of growing length. Diverging draws retry with smaller delta.
pub fn orbit_dim_numeric(
    fields: &[VectorField],
    p: &[C64],
    cfg: &FlowConfig,
    seed: u64,
) -> Result<usize> {
    cfg.validate()?;
    if fields.is_empty() {
        return Err(CrError::BadInput("need at least one field".into()));
    }
    let l = p.len();
    let k_max = if cfg.k_max == 0 { 3 * l } else { cfg.k_max };
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xf10f_5eed);
    let mut best = 0usize;
    let mut flat_rounds = 0usize;
    for k in 1..=k_max {
        let mut rank_k = best;
        for attempt in 0..3 {
            // One cycling word keeps all fields in play; the rest are
            // random.
            let word: Vec<usize> = if attempt == 0 {
                (0..k).map(|j| j % fields.len()).collect()
            } else {
                (0..k).map(|_| rng.gen_range(0..fields.len())).collect()
            };
            let mut local_cfg = *cfg;
            let mut done = false;
            for _ in 0..3 {
                match word_rank(fields, &word, p, &local_cfg, &mut rng) {
                    Ok(r) => {
                        rank_k = rank_k.max(r);
                        done = true;
                        break;
                    }
                    Err(CrError::Diverged(_)) => {
                        local_cfg.delta /= 4.0;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !done {
                return Err(CrError::Diverged(
                    "flows diverged even after shrinking delta".into(),
                ));
            }
        }
        if rank_k > best {
            best = rank_k;
            flat_rounds = 0;
        } else {
            flat_rounds += 1;
        }
        if best >= l || flat_rounds >= 2 {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::cr_fields::{cr_vector_fields, FieldKind};
    use crate::manifold::Manifold;
    use crate::poly::Poly;
    use crate::vars::VarContext;

    fn holf(names: &[&str], coeffs: Vec<Poly>) -> VectorField {
        let _ = names;
        VectorField { name: "X".into(), kind: FieldKind::Hol, coeffs }
    }

    #[test]
    fn translation_flow() {
        let ctx = VarContext::holomorphic(&["z1", "z2"]);
        let x = holf(&[], vec![Poly::one(&ctx), Poly::zero(&ctx)]);
        let cfg = FlowConfig::default();
        let out = flow(&x, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0)], C64::new(1.0, 0.0), &cfg)
            .unwrap();
        assert!((out[0] - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(out[1].norm() < 1e-12);
    }

    #[test]
    fn exponential_flow_accuracy() {
        let ctx = VarContext::holomorphic(&["z1"]);
        let x = holf(&[], vec![Poly::var(&ctx, 0)]);
        let cfg = FlowConfig::default();
        let out = flow(&x, &[C64::new(1.0, 0.0)], C64::new(1.0, 0.0), &cfg).unwrap();
        assert!((out[0].re - 1f64.exp()).abs() < 1e-8, "{}", out[0]);
        assert!(out[0].im.abs() < 1e-10);
    }

    #[test]
    fn linear_flow_gains_x_times_t() {
        // ∂/∂y + x ∂/∂z from (x0, 0, 0): z picks up x0·t.
        let ctx = VarContext::holomorphic(&["x", "y", "z"]);
        let l2 = holf(
            &[],
            vec![Poly::zero(&ctx), Poly::one(&ctx), Poly::var(&ctx, 0)],
        );
        let cfg = FlowConfig::default();
        let x0 = C64::new(2.0, 0.0);
        let t = C64::new(0.3, 0.0);
        let out = flow(&l2, &[x0, C64::new(0.0, 0.0), C64::new(0.0, 0.0)], t, &cfg).unwrap();
        assert!((out[2] - x0 * t).norm() < 1e-9);
        assert!((out[1] - t).norm() < 1e-10);
    }

    #[test]
    fn segment_concatenation_consistency() {
        let ctx = VarContext::holomorphic(&["z1"]);
        let x = holf(&[], vec![Poly::var(&ctx, 0).mul(&Poly::var(&ctx, 0))]);
        let cfg = FlowConfig::default();
        let p = [C64::new(0.5, 0.1)];
        let t1 = C64::new(0.04, 0.02);
        let t2 = C64::new(-0.01, 0.03);
        let two_leg = flow(&x, &flow(&x, &p, t1, &cfg).unwrap(), t2, &cfg).unwrap();
        let direct = flow(&x, &p, t1 + t2, &cfg).unwrap();
        assert!((two_leg[0] - direct[0]).norm() < 1e-6);
    }

    #[test]
    fn orbit_rank_of_remark_system() {
        let ctx = VarContext::holomorphic(&["x", "y", "z"]);
        let l1 = holf(&[], vec![Poly::one(&ctx), Poly::zero(&ctx), Poly::zero(&ctx)]);
        let l2 = holf(
            &[],
            vec![Poly::zero(&ctx), Poly::one(&ctx), Poly::var(&ctx, 0)],
        );
        let cfg = FlowConfig::default();
        let zero = [C64::new(0.0, 0.0); 3];
        for seed in [1, 2, 3] {
            let dim = orbit_dim_numeric(&[l1.clone(), l2.clone()], &zero, &cfg, seed).unwrap();
            assert_eq!(dim, 3);
        }
    }

    #[test]
    fn orbit_rank_single_translation() {
        let ctx = VarContext::holomorphic(&["z1", "z2"]);
        let x = holf(&[], vec![Poly::one(&ctx), Poly::zero(&ctx)]);
        let cfg = FlowConfig::default();
        let zero = [C64::new(0.0, 0.0); 2];
        let dim = orbit_dim_numeric(&[x], &zero, &cfg, 5).unwrap();
        assert_eq!(dim, 1);
    }

    #[test]
    fn orbit_matches_heisenberg_lie_rank() {
        let m = Manifold::Graph(corpus::heisenberg2());
        let basis = cr_vector_fields(&m, 3).unwrap();
        let mut fields = basis.l_fields.clone();
        fields.extend(basis.lbar_fields.clone());
        let cfg = FlowConfig::default();
        let zero = vec![C64::new(0.0, 0.0); 4];
        let dim = orbit_dim_numeric(&fields, &zero, &cfg, 7).unwrap();
        assert_eq!(dim, 3);
    }
}
