//! Logistic-regression maximum likelihood for the outcome regression
//! m(x) = E(Y | L=1, X=x) and the labeling mechanism g(x) = P(L=1 | X=x),
//! with configurable covariate subsets and cross-fitted out-of-fold
//! prediction.
//!
//! The solver is Newton-Raphson/IRLS with step-halving. Only logistic models
//! ship; the [`Learner`] trait is the seam for plugging in data-adaptive
//! learners later.

use crate::data::{Dataset, FoldAssignment, Matrix};
use crate::error::{Error, Result};
use crate::num::{expit, softplus};

/// Coefficient cap: a fit is declared separated and clamped when any
/// coefficient exceeds this in absolute value.
pub const SEPARATION_BOUND: f64 = 30.0;

/// Configuration for nuisance fitting.
#[derive(Debug, Clone)]
pub struct NuisanceSpec {
    /// Feature columns (0-based) entering the outcome model m.
    pub m_covariates: Vec<usize>,
    /// Feature columns (0-based) entering the labeling model g.
    pub g_covariates: Vec<usize>,
    pub include_intercept: bool,
    pub max_iter: usize,
    /// Convergence tolerance on the sup-norm of the score (gradient).
    pub tol: f64,
    /// Truncation for g predictions: the overlap guard.
    pub g_truncation: f64,
    /// Truncation for m predictions: likelihood stability only.
    pub m_truncation: f64,
}

impl Default for NuisanceSpec {
    fn default() -> Self {
        Self {
            m_covariates: Vec::new(),
            g_covariates: Vec::new(),
            include_intercept: true,
            max_iter: 100,
            tol: 1e-8,
            g_truncation: 1e-3,
            m_truncation: 1e-6,
        }
    }
}

impl NuisanceSpec {
    /// Both models on the given covariate subsets, defaults elsewhere.
    pub fn new(m_covariates: Vec<usize>, g_covariates: Vec<usize>) -> Self {
        Self { m_covariates, g_covariates, ..Self::default() }
    }

    /// Both models on all d columns.
    pub fn all_covariates(d: usize) -> Self {
        let all: Vec<usize> = (0..d).collect();
        Self::new(all.clone(), all)
    }
}

/// Fitted logistic model over a covariate subset.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// Intercept first (when present), then one coefficient per subset entry.
    pub coefficients: Vec<f64>,
    pub covariate_subset: Vec<usize>,
    pub has_intercept: bool,
    /// False when the iteration cap was hit or the fit was clamped at the
    /// separation bound.
    pub converged: bool,
}

impl LogisticModel {
    /// expit of the linear predictor at x, truncated to [p_min, 1-p_min].
    pub fn predict_proba(&self, x: &[f64], p_min: f64) -> f64 {
        let mut coefs = self.coefficients.iter();
        let mut t = if self.has_intercept { *coefs.next().unwrap() } else { 0.0 };
        for (&c, &j) in coefs.zip(&self.covariate_subset) {
            t += c * x[j];
        }
        expit(t).clamp(p_min, 1.0 - p_min)
    }
}

/// fit/predict contract that lets other learners slot in behind the
/// cross-fitting machinery.
pub trait Learner {
    fn fit(&self, features: &Matrix, targets: &[f64]) -> Result<Box<dyn Predictor>>;
}

pub trait Predictor {
    fn predict(&self, x: &[f64]) -> f64;
}

impl Predictor for LogisticModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_proba(x, 1e-12)
    }
}

/// Out-of-fold nuisance predictions plus the per-fold fitted models.
#[derive(Debug, Clone)]
pub struct CrossFittedNuisance {
    /// m-hat at each unit, predicted by the model trained without its fold.
    pub m_hat: Vec<f64>,
    /// g-hat at each unit, predicted by the model trained without its fold.
    pub g_hat: Vec<f64>,
    pub fold_models: Vec<FoldModels>,
}

/// The (m, g) pair fit on one training sample.
#[derive(Debug, Clone)]
pub struct FoldModels {
    pub m: LogisticModel,
    pub g: LogisticModel,
}

/// Logistic MLE of targets on `features[:, subset]`.
pub fn fit_logistic(
    features: &Matrix,
    targets: &[f64],
    subset: &[usize],
    spec: &NuisanceSpec,
) -> Result<LogisticModel> {
    let n = features.rows();
    if targets.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} targets for {n} rows",
            targets.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 rows".into()));
    }
    if subset.is_empty() && !spec.include_intercept {
        return Err(Error::InvalidArgument("empty subset without intercept".into()));
    }
    for &j in subset {
        if j >= features.cols() {
            return Err(Error::InvalidArgument(format!(
                "covariate index {j} out of range for {} columns",
                features.cols()
            )));
        }
    }
    for &t in targets {
        if t != 0.0 && t != 1.0 {
            return Err(Error::InvalidArgument(format!("target {t} is not 0/1")));
        }
    }
    let positives: f64 = targets.iter().sum();
    if positives == 0.0 || positives == n as f64 {
        return Err(Error::DegenerateTarget(format!(
            "all {n} targets identical; intercept MLE diverges"
        )));
    }

    let p = subset.len() + usize::from(spec.include_intercept);
    let mut design = Vec::with_capacity(n * p);
    for i in 0..n {
        if spec.include_intercept {
            design.push(1.0);
        }
        for &j in subset {
            design.push(features.get(i, j));
        }
    }
    let (coefficients, converged, _) = irls(&design, targets, n, p, spec.max_iter, spec.tol)?;
    Ok(LogisticModel {
        coefficients,
        covariate_subset: subset.to_vec(),
        has_intercept: spec.include_intercept,
        converged,
    })
}

fn bernoulli_loglik(eta: &[f64], y: &[f64]) -> f64 {
    eta.iter().zip(y).map(|(&t, &yi)| yi * t - softplus(t)).sum()
}

/// Newton/IRLS with step-halving. Returns (coefficients, converged, ll trace);
/// the trace holds the log-likelihood after each accepted step.
pub(crate) fn irls(
    design: &[f64],
    y: &[f64],
    n: usize,
    p: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, bool, Vec<f64>)> {
    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; n];
    let mut ll = bernoulli_loglik(&eta, y);
    let mut trace = vec![ll];
    let mut converged = false;

    for _ in 0..max_iter {
        let mut grad = vec![0.0; p];
        let mut hess = vec![0.0; p * p];
        for i in 0..n {
            let pi = expit(eta[i]);
            let r = y[i] - pi;
            let w = (pi * (1.0 - pi)).max(1e-10);
            let row = &design[i * p..(i + 1) * p];
            for a in 0..p {
                grad[a] += row[a] * r;
                for b in a..p {
                    hess[a * p + b] += w * row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                hess[a * p + b] = hess[b * p + a];
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numerical("non-finite gradient in IRLS".into()));
        }
        if grad.iter().map(|g| g.abs()).fold(0.0, f64::max) <= tol {
            converged = true;
            break;
        }
        let step = solve_spd(hess, &grad, p)?;

        // step-halving on the log-likelihood
        let mut scale = 1.0;
        let (new_beta, new_eta, new_ll) = loop {
            let cand: Vec<f64> =
                beta.iter().zip(&step).map(|(&b, &s)| b + scale * s).collect();
            let mut cand_eta = vec![0.0; n];
            for i in 0..n {
                let row = &design[i * p..(i + 1) * p];
                cand_eta[i] = row.iter().zip(&cand).map(|(&x, &b)| x * b).sum();
            }
            let cand_ll = bernoulli_loglik(&cand_eta, y);
            if cand_ll.is_finite() && cand_ll >= ll - 1e-12 {
                break (cand, cand_eta, cand_ll);
            }
            scale *= 0.5;
            if scale < 1e-8 {
                break (cand, cand_eta, cand_ll);
            }
        };
        beta = new_beta;
        eta = new_eta;
        ll = new_ll;
        trace.push(ll);

        if beta.iter().any(|b| b.abs() > SEPARATION_BOUND) {
            // likely separation: clamp and flag rather than ridge silently
            for b in &mut beta {
                *b = b.clamp(-SEPARATION_BOUND, SEPARATION_BOUND);
            }
            return Ok((beta, false, trace));
        }
    }
    Ok((beta, converged, trace))
}

/// Solve A x = b for symmetric positive definite A (row-major p x p),
/// retrying with a growing ridge if the factorization stalls.
fn solve_spd(mut a: Vec<f64>, b: &[f64], p: usize) -> Result<Vec<f64>> {
    let base = (0..p).map(|i| a[i * p + i]).fold(0.0, f64::max).max(1.0);
    let mut ridge = 0.0;
    for attempt in 0..4 {
        if attempt > 0 {
            ridge = if ridge == 0.0 { 1e-8 * base } else { ridge * 100.0 };
            for i in 0..p {
                a[i * p + i] += ridge;
            }
        }
        if let Some(x) = cholesky_solve(&a, b, p) {
            return Ok(x);
        }
    }
    Err(Error::Numerical("singular Newton system in IRLS".into()))
}

fn cholesky_solve(a: &[f64], b: &[f64], p: usize) -> Option<Vec<f64>> {
    // lower-triangular factor L with A = L L^T
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * p + k] * y[k];
        }
        y[i] = s / l[i * p + i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in (i + 1)..p {
            s -= l[k * p + i] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    Some(x)
}

/// Cross-fitted nuisance estimation: for each fold j, g is fit on all
/// training rows (target L) and m on the labeled training rows (target Y);
/// predictions are filled out-of-fold so unit i only ever sees the model
/// trained without fold j(i).
pub fn fit_cross_fitted(
    dataset: &Dataset,
    folds: &FoldAssignment,
    spec: &NuisanceSpec,
) -> Result<CrossFittedNuisance> {
    if folds.len() != dataset.n() {
        return Err(Error::InvalidArgument(format!(
            "fold assignment covers {} units, dataset has {}",
            folds.len(),
            dataset.n()
        )));
    }
    let n = dataset.n();
    let mut m_hat = vec![0.0; n];
    let mut g_hat = vec![0.0; n];
    let mut fold_models = Vec::with_capacity(folds.num_folds());

    for j in 0..folds.num_folds() {
        let train = folds.training_indices(j);
        let g_feats = dataset.features().select_rows(&train);
        let g_targets: Vec<f64> = train.iter().map(|&i| dataset.label_f64(i)).collect();
        let g_model = fit_logistic(&g_feats, &g_targets, &spec.g_covariates, spec)?;

        let labeled_train: Vec<usize> =
            train.iter().copied().filter(|&i| dataset.is_labeled(i)).collect();
        if labeled_train.is_empty() {
            return Err(Error::FoldStarvation { fold: j });
        }
        let m_feats = dataset.features().select_rows(&labeled_train);
        let m_targets: Vec<f64> = labeled_train.iter().map(|&i| dataset.outcome_f64(i)).collect();
        let m_model = fit_logistic(&m_feats, &m_targets, &spec.m_covariates, spec)?;

        for i in folds.validation_indices(j) {
            let x = dataset.feature_row(i);
            g_hat[i] = g_model.predict_proba(x, spec.g_truncation);
            m_hat[i] = m_model.predict_proba(x, spec.m_truncation);
        }
        fold_models.push(FoldModels { m: m_model, g: g_model });
    }
    Ok(CrossFittedNuisance { m_hat, g_hat, fold_models })
}

/// Non-cross-fitted variant: one (m, g) pair fit on the full sample with
/// in-sample predictions. Matches the reading of the simulation protocol in
/// which parametric nuisances are fit on all rows.
pub fn fit_pooled(dataset: &Dataset, spec: &NuisanceSpec) -> Result<CrossFittedNuisance> {
    let n = dataset.n();
    let all: Vec<usize> = (0..n).collect();
    let g_targets: Vec<f64> = all.iter().map(|&i| dataset.label_f64(i)).collect();
    let g_model = fit_logistic(dataset.features(), &g_targets, &spec.g_covariates, spec)?;

    let labeled: Vec<usize> = all.iter().copied().filter(|&i| dataset.is_labeled(i)).collect();
    if labeled.is_empty() {
        return Err(Error::FoldStarvation { fold: 0 });
    }
    let m_feats = dataset.features().select_rows(&labeled);
    let m_targets: Vec<f64> = labeled.iter().map(|&i| dataset.outcome_f64(i)).collect();
    let m_model = fit_logistic(&m_feats, &m_targets, &spec.m_covariates, spec)?;

    let mut m_hat = vec![0.0; n];
    let mut g_hat = vec![0.0; n];
    for i in 0..n {
        let x = dataset.feature_row(i);
        g_hat[i] = g_model.predict_proba(x, spec.g_truncation);
        m_hat[i] = m_model.predict_proba(x, spec.m_truncation);
    }
    Ok(CrossFittedNuisance { m_hat, g_hat, fold_models: vec![FoldModels { m: m_model, g: g_model }] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_stratified_folds, Dataset, Matrix};
    use crate::num::logit;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec_with(subset: Vec<usize>) -> NuisanceSpec {
        NuisanceSpec::new(subset.clone(), subset)
    }

    #[test]
    fn intercept_only_fit_recovers_logit_of_mean() {
        let features = Matrix::from_rows(vec![vec![0.0]; 8]).unwrap();
        let targets = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let model = fit_logistic(&features, &targets, &[], &spec_with(vec![])).unwrap();
        assert!(model.converged);
        assert_eq!(model.coefficients.len(), 1);
        assert_relative_eq!(model.coefficients[0], logit(0.25), epsilon = 1e-6);
    }

    #[test]
    fn balanced_symmetric_covariate_gets_zero_slope() {
        // same class balance in both arms of a +-1 covariate
        let features = Matrix::from_rows(vec![
            vec![1.0],
            vec![1.0],
            vec![1.0],
            vec![1.0],
            vec![-1.0],
            vec![-1.0],
            vec![-1.0],
            vec![-1.0],
        ])
        .unwrap();
        let targets = vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let model = fit_logistic(&features, &targets, &[0], &spec_with(vec![0])).unwrap();
        assert_relative_eq!(model.coefficients[1], 0.0, epsilon = 1e-8);
        assert_relative_eq!(model.coefficients[0], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn six_point_fit_matches_grid_search() {
        let features = Matrix::from_rows(vec![
            vec![-1.2],
            vec![-0.4],
            vec![0.1],
            vec![0.6],
            vec![1.1],
            vec![1.7],
        ])
        .unwrap();
        let targets = vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        let model = fit_logistic(&features, &targets, &[0], &spec_with(vec![0])).unwrap();

        // independent oracle: dense grid search of the log-likelihood
        let ll = |b0: f64, b1: f64| -> f64 {
            features
                .row(0)
                .iter()
                .count()
                .pipe_ignore();
            (0..6)
                .map(|i| {
                    let t = b0 + b1 * features.get(i, 0);
                    targets[i] * t - crate::num::softplus(t)
                })
                .sum()
        };
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        let mut b0 = -3.0;
        while b0 <= 3.0 {
            let mut b1 = -1.0;
            while b1 <= 5.0 {
                let v = ll(b0, b1);
                if v > best.0 {
                    best = (v, b0, b1);
                }
                b1 += 0.0005;
            }
            b0 += 0.0005;
        }
        assert!((model.coefficients[0] - best.1).abs() < 1e-3);
        assert!((model.coefficients[1] - best.2).abs() < 1e-3);
    }

    // tiny helper so the closure above can borrow features without clippy noise
    trait PipeIgnore {
        fn pipe_ignore(self) {}
    }
    impl PipeIgnore for usize {}

    #[test]
    fn degenerate_targets_error() {
        let features = Matrix::from_rows(vec![vec![0.0], vec![1.0]]).unwrap();
        let err = fit_logistic(&features, &[1.0, 1.0], &[0], &spec_with(vec![0])).unwrap_err();
        assert!(matches!(err, Error::DegenerateTarget(_)));
    }

    #[test]
    fn predict_proba_examples() {
        let model = LogisticModel {
            coefficients: vec![0.0, 0.0],
            covariate_subset: vec![0],
            has_intercept: true,
            converged: true,
        };
        assert_eq!(model.predict_proba(&[3.0], 1e-3), 0.5);

        let model = LogisticModel {
            coefficients: vec![logit(0.9)],
            covariate_subset: vec![],
            has_intercept: true,
            converged: true,
        };
        assert_relative_eq!(model.predict_proba(&[0.0], 1e-3), 0.9, epsilon = 1e-12);

        let model = LogisticModel {
            coefficients: vec![0.0, 50.0],
            covariate_subset: vec![0],
            has_intercept: true,
            converged: true,
        };
        assert_eq!(model.predict_proba(&[10.0], 1e-3), 1.0 - 1e-3);
    }

    #[test]
    fn separation_is_clamped_and_flagged() {
        // perfectly separated
        let features =
            Matrix::from_rows(vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]]).unwrap();
        let targets = vec![0.0, 0.0, 1.0, 1.0];
        let model = fit_logistic(&features, &targets, &[0], &spec_with(vec![0])).unwrap();
        assert!(!model.converged);
        assert!(model.coefficients.iter().all(|c| c.abs() <= SEPARATION_BOUND));
    }

    #[test]
    fn irls_loglik_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 60;
        let mut design = Vec::with_capacity(n * 2);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let x: f64 = rng.random_range(-2.0..2.0);
            design.push(1.0);
            design.push(x);
            y.push(f64::from(rng.random::<f64>() < expit(0.5 + x)));
        }
        let (_, converged, trace) = irls(&design, &y, n, 2, 100, 1e-8).unwrap();
        assert!(converged);
        for w in trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-10, "log-lik decreased: {} -> {}", w[0], w[1]);
        }
    }

    fn toy_dataset(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut label = Vec::new();
        let mut outcome = Vec::new();
        for _ in 0..n {
            let x1: f64 = rng.random_range(-1.0..1.0);
            let x2: f64 = rng.random_range(-1.0..1.0);
            let l = rng.random::<f64>() < expit(x1 + x2);
            rows.push(vec![x1, x2]);
            label.push(l);
            outcome.push(if l { Some(rng.random::<f64>() < expit(1.0 - x1)) } else { None });
        }
        Dataset::new(Matrix::from_rows(rows).unwrap(), label, outcome).unwrap()
    }

    #[test]
    fn leave_one_out_matches_direct_refit() {
        // deterministic 12-row dataset with enough labeled units that every
        // leave-one-out training sample keeps both outcome classes
        let rows: Vec<Vec<f64>> =
            (0..12).map(|i| vec![(f64::from(i) - 5.5) / 3.0]).collect();
        let label: Vec<bool> = (0..12).map(|i| i % 3 != 0).collect();
        let outcome: Vec<Option<bool>> = (0..12)
            .map(|i| if i % 3 != 0 { Some(i % 2 == 0) } else { None })
            .collect();
        let ds = Dataset::new(Matrix::from_rows(rows).unwrap(), label, outcome).unwrap();
        let n = ds.n();
        let folds = FoldAssignment {
            fold_of: (0..n).collect(),
            num_folds: n,
        };
        let spec = spec_with(vec![0]);
        let cf = fit_cross_fitted(&ds, &folds, &spec).unwrap();

        for i in 0..n {
            let train: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let g_feats = ds.features().select_rows(&train);
            let g_t: Vec<f64> = train.iter().map(|&r| ds.label_f64(r)).collect();
            let g_model = fit_logistic(&g_feats, &g_t, &[0], &spec).unwrap();
            let lab: Vec<usize> = train.iter().copied().filter(|&r| ds.is_labeled(r)).collect();
            let m_feats = ds.features().select_rows(&lab);
            let m_t: Vec<f64> = lab.iter().map(|&r| ds.outcome_f64(r)).collect();
            let m_model = fit_logistic(&m_feats, &m_t, &[0], &spec).unwrap();
            assert_eq!(cf.g_hat[i], g_model.predict_proba(ds.feature_row(i), spec.g_truncation));
            assert_eq!(cf.m_hat[i], m_model.predict_proba(ds.feature_row(i), spec.m_truncation));
        }
    }

    #[test]
    fn restricted_subset_gives_two_coefficients() {
        let ds = toy_dataset(60, 5);
        let folds =
            make_stratified_folds(ds.labels(), 3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let spec = NuisanceSpec::new(vec![0, 1], vec![0]);
        let cf = fit_cross_fitted(&ds, &folds, &spec).unwrap();
        for fm in &cf.fold_models {
            assert_eq!(fm.g.coefficients.len(), 2);
            assert_eq!(fm.m.coefficients.len(), 3);
        }
    }

    #[test]
    fn cross_fit_deterministic_given_folds() {
        let ds = toy_dataset(50, 9);
        let folds =
            make_stratified_folds(ds.labels(), 2, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let spec = NuisanceSpec::all_covariates(2);
        let a = fit_cross_fitted(&ds, &folds, &spec).unwrap();
        let b = fit_cross_fitted(&ds, &folds, &spec).unwrap();
        assert_eq!(a.m_hat, b.m_hat);
        assert_eq!(a.g_hat, b.g_hat);
    }

    #[test]
    fn predictions_are_truncated() {
        let ds = toy_dataset(80, 13);
        let folds =
            make_stratified_folds(ds.labels(), 4, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let spec = NuisanceSpec::all_covariates(2);
        let cf = fit_cross_fitted(&ds, &folds, &spec).unwrap();
        for i in 0..ds.n() {
            assert!(cf.g_hat[i] >= spec.g_truncation && cf.g_hat[i] <= 1.0 - spec.g_truncation);
            assert!(cf.m_hat[i] >= spec.m_truncation && cf.m_hat[i] <= 1.0 - spec.m_truncation);
        }
    }

    #[test]
    fn out_of_fold_purity_under_training_permutation() {
        // permuting rows inside a training fold must not move validation
        // predictions (beyond float summation noise)
        let ds = toy_dataset(40, 21);
        let n = ds.n();
        let half = n / 2;
        let fold_of: Vec<usize> = (0..n).map(|i| usize::from(i >= half)).collect();
        let folds = FoldAssignment { fold_of, num_folds: 2 };
        let spec = NuisanceSpec::all_covariates(2);
        let base = fit_cross_fitted(&ds, &folds, &spec).unwrap();

        // swap two rows of fold 1 (training data for fold 0's validation)
        let mut rows: Vec<Vec<f64>> = (0..n).map(|i| ds.feature_row(i).to_vec()).collect();
        let mut label: Vec<bool> = (0..n).map(|i| ds.is_labeled(i)).collect();
        let mut outcome: Vec<Option<bool>> = (0..n).map(|i| ds.outcome(i)).collect();
        rows.swap(half, n - 1);
        label.swap(half, n - 1);
        outcome.swap(half, n - 1);
        let permuted =
            Dataset::new(Matrix::from_rows(rows).unwrap(), label, outcome).unwrap();
        let folds2 = FoldAssignment {
            fold_of: (0..n).map(|i| usize::from(i >= half)).collect(),
            num_folds: 2,
        };
        let perturbed = fit_cross_fitted(&permuted, &folds2, &spec).unwrap();
        for i in 0..half {
            assert_relative_eq!(base.g_hat[i], perturbed.g_hat[i], epsilon = 1e-9);
            assert_relative_eq!(base.m_hat[i], perturbed.m_hat[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn fold_starvation_detected() {
        // 3 labeled units all in fold 0 of 2 folds: training fold for fold 0
        // has no labeled units
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
        let label: Vec<bool> = (0..10).map(|i| i < 3).collect();
        let outcome: Vec<Option<bool>> =
            (0..10).map(|i| if i < 3 { Some(i == 0) } else { None }).collect();
        let ds = Dataset::new(Matrix::from_rows(rows).unwrap(), label, outcome).unwrap();
        let fold_of: Vec<usize> = (0..10).map(|i| usize::from(i >= 3)).collect();
        let folds = FoldAssignment { fold_of, num_folds: 2 };
        let err = fit_cross_fitted(&ds, &folds, &NuisanceSpec::all_covariates(1)).unwrap_err();
        assert!(matches!(err, Error::FoldStarvation { fold: 1 }));
    }
}
