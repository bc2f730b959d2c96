//! Thresholding operators.
//!
//! * [`hard_threshold`] / [`top_k_support`]: `H_k` and `L_k`.
//! * [`exact_optimal_threshold`]: the binary optimal k-thresholding, solved
//!   by enumerating supports.
//! * [`project_capped_simplex`] and [`solve_rot`]: the convex relaxation
//!   `min ||y - A(w ⊗ u)||^2  s.t.  sum(w) = k, 0 <= w <= 1`.

use std::cmp::Ordering;

use crate::error::{check_len, invalid, Error, Result};
use crate::linalg::{dot, power_iteration, DenseMatrix, SupportSet};
use crate::problem::SolverConfig;

/// Safety factor applied to the power-iteration estimate of the Lipschitz
/// constant.
const LIPSCHITZ_MARGIN: f64 = 1.01;

/// Indices of the `k` largest magnitudes, ties resolved toward the lower index.
fn largest_magnitudes(v: &[f64], k: usize) -> Vec<usize> {
    let by_magnitude = |&a: &usize, &b: &usize| -> Ordering {
        v[b].abs().total_cmp(&v[a].abs()).then_with(|| a.cmp(&b))
    };
    let mut idx: Vec<usize> = (0..v.len()).collect();
    if k < v.len() {
        if k > 0 {
            idx.select_nth_unstable_by(k - 1, by_magnitude);
        }
        idx.truncate(k);
    }
    idx.sort_unstable();
    idx
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        Err(invalid(format!(
            "threshold level k = {k} exceeds dimension n = {n}"
        )))
    } else {
        Ok(())
    }
}

/// `H_k(v)`: keeps the `k` largest-magnitude entries and zeroes the rest.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k, v.len())?;
    let mut out = vec![0.0; v.len()];
    for i in largest_magnitudes(v, k) {
        out[i] = v[i];
    }
    Ok(out)
}

/// `L_k(v) = supp(H_k(v))`.
pub fn top_k_support(v: &[f64], k: usize) -> Result<SupportSet> {
    check_k(k, v.len())?;
    let idx = largest_magnitudes(v, k)
        .into_iter()
        .filter(|&i| v[i] != 0.0)
        .collect();
    Ok(SupportSet::from_sorted_unchecked(idx))
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(p) => acc = p / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

pub(crate) fn check_enumeration(candidates: usize, k: usize, limit: u64) -> Result<()> {
    let combinations = binomial(candidates, k);
    if combinations > limit as u128 {
        Err(Error::EnumerationLimit {
            combinations,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Result of the binary optimal k-thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalThreshold {
    /// Binary selection vector with exactly `k` ones.
    pub w: Vec<f64>,
    /// `u ⊗ w`
    pub x: Vec<f64>,
    /// `||y - A(u ⊗ w)||_2^2`
    pub objective: f64,
}

/// Solves `min_w ||y - A(u ⊗ w)||^2` over binary `w` with exactly `k` ones by
/// enumerating all `C(n, k)` supports in lexicographic order; the first
/// minimizer wins.
pub fn exact_optimal_threshold(
    a: &DenseMatrix,
    y: &[f64],
    u: &[f64],
    k: usize,
    exhaustive_limit: u64,
) -> Result<OptimalThreshold> {
    check_dims(a, y, u)?;
    check_k(k, a.cols())?;
    let all = SupportSet::from_sorted_unchecked((0..a.cols()).collect());
    optimal_threshold_within(a, y, u, k, &all, exhaustive_limit)
}

/// Same as [`exact_optimal_threshold`], but only supports inside
/// `candidates` are enumerated. Positions outside `candidates` are assumed to
/// have `u_i = 0`, so they cannot change `u ⊗ w`. If fewer than `k`
/// candidates exist, the selection is padded with the lowest free indices.
pub(crate) fn optimal_threshold_within(
    a: &DenseMatrix,
    y: &[f64],
    u: &[f64],
    k: usize,
    candidates: &SupportSet,
    exhaustive_limit: u64,
) -> Result<OptimalThreshold> {
    let n = a.cols();
    let m = a.rows();
    let pool = candidates.indices();
    let pick = k.min(pool.len());
    check_enumeration(pool.len(), pick, exhaustive_limit)?;

    let scaled: Vec<Vec<f64>> = pool
        .iter()
        .map(|&j| (0..m).map(|i| a.get(i, j) * u[j]).collect())
        .collect();

    // res[d] is the residual after subtracting the first d chosen columns.
    let mut combo: Vec<usize> = (0..pick).collect();
    let mut res: Vec<Vec<f64>> = vec![y.to_vec(); pick + 1];
    let refresh = |res: &mut Vec<Vec<f64>>, combo: &[usize], from: usize| {
        for d in from..combo.len() {
            let (lo, hi) = res.split_at_mut(d + 1);
            for ((r, prev), b) in hi[0].iter_mut().zip(&lo[d]).zip(&scaled[combo[d]]) {
                *r = prev - b;
            }
        }
    };
    refresh(&mut res, &combo, 0);

    let mut best_obj = f64::INFINITY;
    let mut best = combo.clone();
    let p = pool.len();
    loop {
        let last = &res[pick];
        let obj = dot(last, last);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&combo);
        }
        let Some(i) = (0..pick).rev().find(|&i| combo[i] < p - pick + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..pick {
            combo[j] = combo[j - 1] + 1;
        }
        refresh(&mut res, &combo, i);
    }

    let mut w = vec![0.0; n];
    for &c in &best {
        w[pool[c]] = 1.0;
    }
    let mut missing = k - pick;
    for slot in w.iter_mut() {
        if missing == 0 {
            break;
        }
        if *slot == 0.0 {
            *slot = 1.0;
            missing -= 1;
        }
    }
    let x = u.iter().zip(&w).map(|(ui, wi)| ui * wi).collect();
    Ok(OptimalThreshold {
        w,
        x,
        objective: best_obj,
    })
}

/// Euclidean projection onto the capped simplex `{w : sum(w) = k, 0 <= w <= 1}`.
///
/// The projection is `clamp(v - theta, 0, 1)`, where the shift `theta` is
/// located by sweeping the sorted breakpoints `v_i - 1` and `v_i` of the
/// piecewise-linear map `theta -> sum clamp(v_i - theta, 0, 1)`.
pub fn project_capped_simplex(v: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = v.len();
    check_k(k, n)?;
    if k == 0 {
        return Ok(vec![0.0; n]);
    }
    if k == n {
        return Ok(vec![1.0; n]);
    }
    let target = k as f64;
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * n);
    for &vi in v {
        events.push((vi - 1.0, 1));
        events.push((vi, -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut theta = events[0].0;
    let mut mass = n as f64;
    let mut active = 0i32;
    let mut found = None;
    for &(t, delta) in &events {
        let at_t = mass - active as f64 * (t - theta);
        if at_t <= target {
            found = Some(theta + (mass - target) / active as f64);
            break;
        }
        theta = t;
        mass = at_t;
        active += delta;
    }
    let mut theta = found.unwrap_or(theta);

    // One Newton correction removes the drift accumulated by the sweep.
    let (sum, free) = v.iter().fold((0.0, 0usize), |(s, f), &vi| {
        let c = vi - theta;
        (s + c.clamp(0.0, 1.0), f + usize::from(c > 0.0 && c < 1.0))
    });
    if free > 0 {
        theta += (sum - target) / free as f64;
    }
    Ok(v.iter().map(|vi| (vi - theta).clamp(0.0, 1.0)).collect())
}

/// Solution of the relaxed optimal-thresholding QP.
#[derive(Debug, Clone, PartialEq)]
pub struct RotSolution {
    /// Feasible weights: `0 <= w_i <= 1`, `sum(w) = k`.
    pub w: Vec<f64>,
    /// `||y - A(w ⊗ u)||_2^2`
    pub objective: f64,
    pub iterations: usize,
    /// Projected-gradient fixed-point residual of `w`.
    pub kkt_residual: f64,
    pub converged: bool,
}

/// Solves `min_w ||y - A(w ⊗ u)||^2  s.t.  sum(w) = k, 0 <= w <= 1`.
///
/// Accelerated projected gradient on `g(w) = 0.5 ||y - B w||^2` with
/// `B = A diag(u)`, constant step `1/L` (`L` from power iteration on `B^T B`
/// times a 1.01 margin), gradient-based momentum restart, and warm start
/// `w = (k/n) e`. The iteration stops once
/// `||w - P(w - grad g(w) / L)||_2 <= cfg.rot_tolerance`. If the iteration
/// cap is hit, the iterate with the smallest residual is returned with
/// `converged = false`.
pub fn solve_rot(
    a: &DenseMatrix,
    y: &[f64],
    u: &[f64],
    k: usize,
    cfg: &SolverConfig,
) -> Result<RotSolution> {
    check_dims(a, y, u)?;
    let n = a.cols();
    check_k(k, n)?;

    // Only columns with u_j != 0 enter B; the gradient vanishes elsewhere.
    let active = SupportSet::of(u);
    let cols = active.indices();
    let s = cols.len();
    let gram_a = a.gram_of_columns(cols);
    let mut gram = vec![0.0; s * s];
    for i in 0..s {
        for j in 0..s {
            gram[i * s + j] = u[cols[i]] * gram_a[i * s + j] * u[cols[j]];
        }
    }
    let aty = a.transpose_mat_vec(y)?;
    let lin: Vec<f64> = cols.iter().map(|&j| u[j] * aty[j]).collect();

    let gram_times = |w: &[f64], out: &mut [f64]| {
        for i in 0..s {
            let row = &gram[i * s..(i + 1) * s];
            out[i] = cols.iter().zip(row).map(|(&j, g)| g * w[j]).sum();
        }
    };

    let w0 = vec![k as f64 / n as f64; n];
    let lipschitz = LIPSCHITZ_MARGIN
        * power_iteration(s, |v, out| {
            for i in 0..s {
                out[i] = dot(&gram[i * s..(i + 1) * s], v);
            }
        });
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        // B = 0: every feasible point is optimal.
        return Ok(finish(a, y, u, w0, 0, 0.0, true));
    }
    let step = 1.0 / lipschitz;

    // grad_j = (G w)_j - c_j on the active columns, zero elsewhere.
    let gradient_step = |point: &[f64], gw: &[f64]| -> Vec<f64> {
        let mut out = point.to_vec();
        for (i, &j) in cols.iter().enumerate() {
            out[j] -= step * (gw[i] - lin[i]);
        }
        out
    };
    let certificate = |w: &[f64], gw: &[f64]| -> Result<f64> {
        let p = project_capped_simplex(&gradient_step(w, gw), k)?;
        Ok(w.iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    };

    let mut w = w0;
    let mut gw = vec![0.0; s];
    gram_times(&w, &mut gw);
    let mut residual = certificate(&w, &gw)?;
    let mut best = (residual, w.clone());
    if residual <= cfg.rot_tolerance {
        return Ok(finish(a, y, u, w, 0, residual, true));
    }

    let mut z = w.clone();
    let mut gz = gw.clone();
    let mut t = 1.0f64;
    let mut gw_next = vec![0.0; s];
    for it in 1..=cfg.rot_max_iterations {
        let w_next = project_capped_simplex(&gradient_step(&z, &gz), k)?;
        gram_times(&w_next, &mut gw_next);

        residual = certificate(&w_next, &gw_next)?;
        if residual <= cfg.rot_tolerance {
            return Ok(finish(a, y, u, w_next, it, residual, true));
        }
        if residual < best.0 {
            best = (residual, w_next.clone());
        }

        // restart when the momentum direction opposes the gradient-mapping step
        let restart: f64 = z
            .iter()
            .zip(&w_next)
            .zip(&w)
            .map(|((zi, wn), wi)| (zi - wn) * (wn - wi))
            .sum();
        let beta = if restart > 0.0 {
            t = 1.0;
            0.0
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let b = (t - 1.0) / t_next;
            t = t_next;
            b
        };
        for ((zi, wn), wi) in z.iter_mut().zip(&w_next).zip(&w) {
            *zi = wn + beta * (wn - wi);
        }
        for ((gzi, gn), gi) in gz.iter_mut().zip(&gw_next).zip(&gw) {
            *gzi = gn + beta * (gn - gi);
        }
        w = w_next;
        std::mem::swap(&mut gw, &mut gw_next);
    }
    let (residual, w) = best;
    Ok(finish(a, y, u, w, cfg.rot_max_iterations, residual, false))
}

fn finish(
    a: &DenseMatrix,
    y: &[f64],
    u: &[f64],
    w: Vec<f64>,
    iterations: usize,
    kkt_residual: f64,
    converged: bool,
) -> RotSolution {
    let x: Vec<f64> = w.iter().zip(u).map(|(wi, ui)| wi * ui).collect();
    let ax = a.mat_vec_sparse(&x);
    let r: Vec<f64> = y.iter().zip(&ax).map(|(yi, ai)| yi - ai).collect();
    RotSolution {
        w,
        objective: dot(&r, &r),
        iterations,
        kkt_residual,
        converged,
    }
}

fn check_dims(a: &DenseMatrix, y: &[f64], u: &[f64]) -> Result<()> {
    check_len("measurement vector", a.rows(), y.len())?;
    check_len("thresholding input", a.cols(), u.len())
}

/// Squared distance `||v - z||^2` for the best `k`-sparse `z` on `support`.
#[cfg(test)]
fn best_on_support(v: &[f64], support: &[usize]) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| !support.contains(i))
        .map(|(_, x)| x * x)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::distance;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn hard_threshold_examples() {
        let v = [3.0, 1.0, -4.0, 0.0];
        assert_eq!(hard_threshold(&v, 2).unwrap(), vec![3.0, 0.0, -4.0, 0.0]);
        assert_eq!(hard_threshold(&v, 4).unwrap(), v.to_vec());
        assert_eq!(
            hard_threshold(&[2.0, -2.0, 1.0], 1).unwrap(),
            vec![2.0, 0.0, 0.0]
        );
        assert_eq!(hard_threshold(&v, 0).unwrap(), vec![0.0; 4]);
        assert!(hard_threshold(&v, 5).is_err());
    }

    #[test]
    fn top_k_support_examples() {
        let s = |v: &[f64], k| top_k_support(v, k).unwrap().indices().to_vec();
        assert_eq!(s(&[3.0, 1.0, -4.0, 0.0], 2), vec![0, 2]);
        assert_eq!(s(&[0.0, 0.0, 5.0, 0.0], 3), vec![2]);
        assert_eq!(s(&[2.0, -2.0, 1.0], 1), vec![0]);
        assert!(top_k_support(&[1.0], 2).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(30, 10), 30_045_015);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    fn example_3x4() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn exact_threshold_examples() {
        let a = example_3x4();
        let ot = exact_optimal_threshold(&a, &[1.0, 1.0, 0.0], &[1.0; 4], 2, 1000).unwrap();
        assert_eq!(ot.w, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(ot.objective, 0.0);

        let ot =
            exact_optimal_threshold(&a, &[1.0, 2.0, 3.0], &[1.0, -1.0, 2.0, 0.5], 4, 1000).unwrap();
        assert_eq!(ot.w, vec![1.0; 4]);

        // zero residual attainable on supp(u)
        let u = [0.0, 2.0, 0.0, -1.0];
        let y = a.mat_vec(&u).unwrap();
        let ot = exact_optimal_threshold(&a, &y, &u, 2, 1000).unwrap();
        assert_eq!(ot.w, vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(ot.x, u.to_vec());
        assert_eq!(ot.objective, 0.0);
    }

    #[test]
    fn exact_threshold_guard() {
        let a = DenseMatrix::identity(30);
        let err = exact_optimal_threshold(&a, &[0.0; 30], &[1.0; 30], 10, 200_000).unwrap_err();
        assert!(matches!(
            err,
            Error::EnumerationLimit {
                combinations: 30_045_015,
                ..
            }
        ));
        assert!(err.to_string().contains("too large for exact OP"));
    }

    #[test]
    fn restricted_threshold_pads_with_lowest_free_index() {
        let a = example_3x4();
        let u = [0.0, 0.0, 3.0, 0.0];
        let cand = SupportSet::of(&u);
        let ot = optimal_threshold_within(&a, &[0.0, 0.0, 3.0], &u, 2, &cand, 10).unwrap();
        assert_eq!(ot.w, vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(ot.x, u.to_vec());
        assert_eq!(ot.objective, 0.0);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(
            project_capped_simplex(&[1.0, 0.0, 0.0], 1).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(
            project_capped_simplex(&[5.0, -3.0, 0.2], 3).unwrap(),
            vec![1.0; 3]
        );
        assert_eq!(
            project_capped_simplex(&[5.0, -3.0], 0).unwrap(),
            vec![0.0; 2]
        );
        let p = project_capped_simplex(&[0.9, 0.5, 0.1], 1).unwrap();
        assert!(distance(&p, &[0.7, 0.3, 0.0]) < 1e-12, "{p:?}");
        assert!(project_capped_simplex(&[0.0], 2).is_err());
    }

    /// Brute-force projection: for each of the 3^n assignments of coordinates
    /// to {lower bound, upper bound, free}, solve the equality-constrained
    /// problem on the free block in closed form, keep box-feasible candidates
    /// and return the nearest one.
    pub(crate) fn projection_oracle(v: &[f64], k: usize) -> Vec<f64> {
        let n = v.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut state = vec![0u8; n];
            for s in state.iter_mut() {
                *s = (c % 3) as u8;
                c /= 3;
            }
            let uppers = state.iter().filter(|&&s| s == 1).count();
            let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
            let mut w: Vec<f64> = state
                .iter()
                .map(|&s| if s == 1 { 1.0 } else { 0.0 })
                .collect();
            if free.is_empty() {
                if uppers != k {
                    continue;
                }
            } else {
                let shift = (free.iter().map(|&i| v[i]).sum::<f64>() + uppers as f64 - k as f64)
                    / free.len() as f64;
                let mut ok = true;
                for &i in &free {
                    w[i] = v[i] - shift;
                    if w[i] < -1e-12 || w[i] > 1.0 + 1e-12 {
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
            }
            let d = distance(&w, v);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, w));
            }
        }
        best.expect("capped simplex is nonempty").1
    }

    #[test]
    fn projection_matches_oracle_on_hand_cases() {
        for (v, k) in [
            (vec![0.9, 0.5, 0.1], 1),
            (vec![2.0, 2.0, 2.0, -1.0], 2),
            (vec![0.3, 0.3, 0.3, 0.3], 1),
            (vec![-5.0, 10.0, 0.5], 2),
        ] {
            let p = project_capped_simplex(&v, k).unwrap();
            let o = projection_oracle(&v, k);
            assert!(distance(&p, &o) < 1e-10, "{v:?} {k}: {p:?} vs {o:?}");
        }
    }

    fn vec_and_k() -> impl Strategy<Value = (Vec<f64>, usize)> {
        (1usize..=7).prop_flat_map(|n| (proptest::collection::vec(-3.0f64..3.0, n), 0..=n))
    }

    proptest! {
        #[test]
        fn hard_threshold_is_best_k_sparse_approximation((v, k) in vec_and_k()) {
            let h = hard_threshold(&v, k).unwrap();
            let got: f64 = v.iter().zip(&h).map(|(a, b)| (a - b) * (a - b)).sum();
            let n = v.len();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != k { continue; }
                let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                prop_assert!(got <= best_on_support(&v, &support) + 1e-12);
            }
        }

        #[test]
        fn projection_is_feasible_idempotent_and_nonexpansive(
            (a, k) in vec_and_k(),
            noise in proptest::collection::vec(-2.0f64..2.0, 7),
        ) {
            let b: Vec<f64> = a.iter().zip(&noise).map(|(x, e)| x + e).collect();
            let pa = project_capped_simplex(&a, k).unwrap();
            let pb = project_capped_simplex(&b, k).unwrap();
            prop_assert!((pa.iter().sum::<f64>() - k as f64).abs() <= 1e-10 * (k.max(1) as f64));
            prop_assert!(pa.iter().all(|w| (0.0..=1.0).contains(w)));
            let again = project_capped_simplex(&pa, k).unwrap();
            prop_assert!(distance(&again, &pa) <= 1e-12);
            prop_assert!(distance(&pa, &pb) <= distance(&a, &b) + 1e-12);
        }
    }

    fn gaussian_instance(seed: u64, m: usize, n: usize) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = |len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let a = DenseMatrix::new(m, n, g(m * n)).unwrap();
        (a, g(m), g(n))
    }

    #[test]
    fn rot_singleton_feasible_set() {
        let (a, y, u) = gaussian_instance(1, 4, 5);
        let sol = solve_rot(&a, &y, &u, 5, &SolverConfig::default()).unwrap();
        assert_eq!(sol.w, vec![1.0; 5]);
        assert!(sol.converged);
    }

    #[test]
    fn rot_reaches_zero_when_binary_point_fits() {
        let (a, _, u) = gaussian_instance(2, 6, 10);
        let mut w0 = vec![0.0; 10];
        w0[3] = 1.0;
        w0[7] = 1.0;
        let x: Vec<f64> = u.iter().zip(&w0).map(|(a, b)| a * b).collect();
        let y = a.mat_vec(&x).unwrap();
        let sol = solve_rot(&a, &y, &u, 2, &SolverConfig::default()).unwrap();
        assert!(sol.objective <= 1e-8, "{}", sol.objective);
    }

    #[test]
    fn rot_with_zero_u_keeps_warm_start() {
        let a = DenseMatrix::identity(4);
        let sol = solve_rot(
            &a,
            &[1.0, 2.0, 0.0, 0.0],
            &[0.0; 4],
            2,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(sol.w, vec![0.5; 4]);
        assert_eq!(sol.objective, 5.0);
    }

    #[test]
    fn rot_is_feasible_and_relaxes_exact_threshold() {
        let cfg = SolverConfig::default();
        for seed in 0..10 {
            let (a, y, u) = gaussian_instance(100 + seed, 6, 10);
            let sol = solve_rot(&a, &y, &u, 2, &cfg).unwrap();
            assert!(sol.w.iter().all(|w| (0.0..=1.0).contains(w)));
            assert!((sol.w.iter().sum::<f64>() - 2.0).abs() <= 1e-9 * 2.0);
            assert!(!sol.converged || sol.kkt_residual <= cfg.rot_tolerance);
            let ot = exact_optimal_threshold(&a, &y, &u, 2, cfg.exhaustive_limit).unwrap();
            assert!(sol.objective <= ot.objective + 1e-6, "seed {seed}");
        }
    }
}
