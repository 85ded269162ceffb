//! One-hidden-layer ReLU network over the overlap features, trained with
//! plain per-example SGD on softmax cross-entropy.
//!
//! Parameters are stored row-major. The flat parameter order used by
//! [`BiasClassifier::parameters`] and [`BiasClassifier::loss_and_gradient`]
//! is: hidden weights, hidden bias, output weights, output bias.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{extract_overlap_features, BiasError, EmbeddingStore, FeatureConfig, FeatureVector, NUM_FEATURES};
use crate::corpus::NliLabel;

/// Class ids of the per-ending plausibility scorer used for multiple choice.
pub const IMPLAUSIBLE: usize = 0;
pub const PLAUSIBLE: usize = 1;

const INIT_RANGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            hidden: 32,
            learning_rate: 0.05,
            epochs: 10,
            l2: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasClassifier {
    hidden: usize,
    classes: usize,
    hidden_weights: Vec<f64>,
    hidden_bias: Vec<f64>,
    output_weights: Vec<f64>,
    output_bias: Vec<f64>,
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

struct Forward {
    pre: Vec<f64>,
    act: Vec<f64>,
    probs: Vec<f64>,
}

impl BiasClassifier {
    /// Weights uniform in `[-0.1, 0.1]`, biases zero.
    pub fn init(hidden: usize, classes: usize, rng: &mut impl Rng) -> Self {
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE)).collect()
        };
        let hidden_weights = draw(hidden * NUM_FEATURES);
        let output_weights = draw(classes * hidden);
        BiasClassifier {
            hidden,
            classes,
            hidden_weights,
            hidden_bias: vec![0.0; hidden],
            output_weights,
            output_bias: vec![0.0; classes],
        }
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    fn forward(&self, x: &[f64; NUM_FEATURES]) -> Forward {
        let mut pre = self.hidden_bias.clone();
        for (j, p) in pre.iter_mut().enumerate() {
            let row = &self.hidden_weights[j * NUM_FEATURES..(j + 1) * NUM_FEATURES];
            *p += row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
        let act: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
        let mut logits = self.output_bias.clone();
        for (k, l) in logits.iter_mut().enumerate() {
            let row = &self.output_weights[k * self.hidden..(k + 1) * self.hidden];
            *l += row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>();
        }
        Forward {
            pre,
            act,
            probs: softmax(&logits),
        }
    }

    pub fn predict_proba(&self, fv: &FeatureVector) -> Vec<f64> {
        self.forward(&fv.to_array()).probs
    }

    /// Argmax class; ties go to the lower index.
    pub fn predict(&self, fv: &FeatureVector) -> usize {
        argmax(&self.predict_proba(fv))
    }

    pub fn parameters(&self) -> Vec<f64> {
        [
            &self.hidden_weights[..],
            &self.hidden_bias,
            &self.output_weights,
            &self.output_bias,
        ]
        .concat()
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.parameters().len(), "parameter count");
        let (hw, rest) = params.split_at(self.hidden_weights.len());
        let (hb, rest) = rest.split_at(self.hidden);
        let (ow, ob) = rest.split_at(self.output_weights.len());
        self.hidden_weights.copy_from_slice(hw);
        self.hidden_bias.copy_from_slice(hb);
        self.output_weights.copy_from_slice(ow);
        self.output_bias.copy_from_slice(ob);
    }

    /// Per-example cross-entropy and its gradient, flat parameter order.
    fn example_gradient(&self, x: &[f64; NUM_FEATURES], class: usize, grad: &mut [f64]) -> f64 {
        let f = self.forward(x);
        let loss = -f.probs[class].max(f64::MIN_POSITIVE).ln();
        let h = self.hidden;
        let (g_hw, rest) = grad.split_at_mut(h * NUM_FEATURES);
        let (g_hb, rest) = rest.split_at_mut(h);
        let (g_ow, g_ob) = rest.split_at_mut(self.classes * h);

        let mut d_act = vec![0.0; h];
        for k in 0..self.classes {
            let d_logit = f.probs[k] - if k == class { 1.0 } else { 0.0 };
            g_ob[k] += d_logit;
            for j in 0..h {
                g_ow[k * h + j] += d_logit * f.act[j];
                d_act[j] += d_logit * self.output_weights[k * h + j];
            }
        }
        for j in 0..h {
            if f.pre[j] <= 0.0 {
                continue;
            }
            g_hb[j] += d_act[j];
            for (i, xi) in x.iter().enumerate() {
                g_hw[j * NUM_FEATURES + i] += d_act[j] * xi;
            }
        }
        loss
    }

    /// Mean cross-entropy over `data` plus `l2 / 2 * |weights|^2`, with its
    /// analytic gradient. Biases are not regularized.
    pub fn loss_and_gradient(&self, data: &[(FeatureVector, usize)], l2: f64) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.parameters().len()];
        let mut loss = 0.0;
        for (fv, class) in data {
            loss += self.example_gradient(&fv.to_array(), *class, &mut grad);
        }
        let n = data.len().max(1) as f64;
        loss /= n;
        grad.iter_mut().for_each(|g| *g /= n);
        if l2 != 0.0 {
            let params = self.parameters();
            for (idx, (g, p)) in grad.iter_mut().zip(&params).enumerate() {
                if self.is_weight(idx) {
                    *g += l2 * p;
                    loss += 0.5 * l2 * p * p;
                }
            }
        }
        (loss, grad)
    }

    fn is_weight(&self, flat_idx: usize) -> bool {
        let hw = self.hidden_weights.len();
        let hb = hw + self.hidden;
        let ow = hb + self.output_weights.len();
        flat_idx < hw || (hb..ow).contains(&flat_idx)
    }

    fn sgd_step(&mut self, fv: &FeatureVector, class: usize, hyper: &Hyper) {
        let mut params = self.parameters();
        let mut grad = vec![0.0; params.len()];
        self.example_gradient(&fv.to_array(), class, &mut grad);
        for (idx, (p, g)) in params.iter_mut().zip(&grad).enumerate() {
            let decay = if self.is_weight(idx) { hyper.l2 * *p } else { 0.0 };
            *p -= hyper.learning_rate * (g + decay);
        }
        self.set_parameters(&params);
    }
}

/// Largest relative disagreement between the analytic gradient and a
/// central finite difference with step `eps`, over all parameters.
/// Components where both are below `1e-8` in magnitude are ignored.
pub fn gradient_check(
    clf: &BiasClassifier,
    data: &[(FeatureVector, usize)],
    l2: f64,
    eps: f64,
) -> f64 {
    let (_, analytic) = clf.loss_and_gradient(data, l2);
    let params = clf.parameters();
    let mut probe = clf.clone();
    let mut worst = 0.0f64;
    for i in 0..params.len() {
        let mut shifted = params.clone();
        shifted[i] = params[i] + eps;
        probe.set_parameters(&shifted);
        let plus = probe.loss_and_gradient(data, l2).0;
        shifted[i] = params[i] - eps;
        probe.set_parameters(&shifted);
        let minus = probe.loss_and_gradient(data, l2).0;
        let numeric = (plus - minus) / (2.0 * eps);
        let scale = analytic[i].abs().max(numeric.abs());
        if scale > 1e-8 {
            worst = worst.max((analytic[i] - numeric).abs() / scale);
        }
    }
    worst
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Trains a fresh classifier. `seed` drives initialization and the
/// per-epoch shuffle, so `(data, classes, hyper)` fix the result exactly.
pub fn train_bias_classifier(
    data: &[(FeatureVector, usize)],
    classes: usize,
    hyper: &Hyper,
) -> Result<BiasClassifier, BiasError> {
    if classes < 2 {
        return Err(BiasError::Config("at least 2 classes are required".into()));
    }
    if hyper.hidden == 0 || !hyper.learning_rate.is_finite() || !hyper.l2.is_finite() {
        return Err(BiasError::Config(format!("invalid hyperparameters {hyper:?}")));
    }
    let first = data.first().ok_or(BiasError::EmptyData)?.1;
    if let Some(&(_, class)) = data.iter().find(|(_, c)| *c >= classes) {
        return Err(BiasError::ClassOutOfRange { class, classes });
    }
    if data.iter().all(|(_, c)| *c == first) {
        return Err(BiasError::SingleClass);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut clf = BiasClassifier::init(hyper.hidden, classes, &mut rng);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (fv, class) = &data[i];
            clf.sgd_step(fv, *class, hyper);
        }
    }
    Ok(clf)
}

pub fn predict_nli(clf: &BiasClassifier, fv: &FeatureVector) -> Result<NliLabel, BiasError> {
    if clf.classes() != 3 {
        return Err(BiasError::ClassMismatch {
            expected: 3,
            found: clf.classes(),
        });
    }
    Ok(NliLabel::from_index(clf.predict(fv)).expect("3-class classifier"))
}

/// Index of the ending the plausibility scorer likes best; ties go to the
/// lowest index.
pub fn predict_mc<S: AsRef<str>>(
    clf: &BiasClassifier,
    premise: &[S],
    endings: &[Vec<S>],
    store: &EmbeddingStore,
    config: FeatureConfig,
) -> Result<usize, BiasError> {
    if clf.classes() != 2 {
        return Err(BiasError::ClassMismatch {
            expected: 2,
            found: clf.classes(),
        });
    }
    let scores: Vec<f64> = endings
        .iter()
        .map(|e| {
            let fv = extract_overlap_features(premise, e, store, config).features;
            clf.predict_proba(&fv)[PLAUSIBLE]
        })
        .collect();
    Ok(argmax(&scores))
}
