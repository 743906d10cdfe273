//! Fully connected Q-function with rectifier hidden layers and analytic
//! gradients. Parameters live in one flat vector; each layer stores its
//! weight matrix (row-major, `out x in`) followed by its bias vector.

use rand::Rng;

use crate::model::Layer;

pub const DEFAULT_ARCHITECTURE: [usize; 4] = [super::STATE_DIM, 32, 32, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl QNetwork {
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2, "network needs at least an input and an output layer");
        assert_eq!(*sizes.last().unwrap(), 3, "one output per layer");
        QNetwork {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        }
    }

    /// He-style uniform initialization scaled by fan-in; biases start at zero.
    pub fn init<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(sizes);
        let mut offset = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / fan_in as f64).sqrt();
            for p in &mut net.params[offset..offset + fan_in * fan_out] {
                *p = rng.random_range(-limit..limit);
            }
            offset += fan_in * fan_out + fan_out;
        }
        net
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Option<Self> {
        let net = Self::zeros(sizes);
        (params.len() == net.params.len()).then_some(QNetwork { params, ..net })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Runs the network and returns every layer's post-activation output,
    /// starting with the input itself.
    fn activations(&self, input: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(input.len(), self.sizes[0]);
        let n_layers = self.sizes.len() - 1;
        let mut acts = Vec::with_capacity(n_layers + 1);
        acts.push(input.to_vec());
        let mut offset = 0;
        for (k, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + n_in * n_out];
            let biases = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let prev = &acts[k];
            let hidden = k + 1 < n_layers;
            let out: Vec<f64> = (0..n_out)
                .map(|j| {
                    let row = &weights[j * n_in..(j + 1) * n_in];
                    let z = biases[j] + row.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
                    if hidden {
                        z.max(0.0)
                    } else {
                        z
                    }
                })
                .collect();
            acts.push(out);
            offset += n_in * n_out + n_out;
        }
        acts
    }

    pub fn forward(&self, input: &[f64]) -> [f64; 3] {
        let out = self.activations(input).pop().unwrap();
        [out[0], out[1], out[2]]
    }

    /// Adds `scale * d/dθ (Q(input)[action] - target)^2` into `grad` and
    /// returns the squared error.
    pub fn accumulate_gradient(&self, input: &[f64], action: Layer, target: f64, scale: f64, grad: &mut [f64]) -> f64 {
        assert_eq!(grad.len(), self.params.len());
        let acts = self.activations(input);
        let n_layers = self.sizes.len() - 1;
        let q = acts[n_layers][action.index()];
        let err = q - target;

        // delta holds dLoss/dz for the current layer's pre-activations.
        let mut delta = vec![0.0; 3];
        delta[action.index()] = 2.0 * err * scale;

        let mut offsets = Vec::with_capacity(n_layers);
        let mut offset = 0;
        for w in self.sizes.windows(2) {
            offsets.push(offset);
            offset += w[0] * w[1] + w[1];
        }

        for k in (0..n_layers).rev() {
            let (n_in, n_out) = (self.sizes[k], self.sizes[k + 1]);
            let base = offsets[k];
            let prev = &acts[k];
            for j in 0..n_out {
                let d = delta[j];
                if d == 0.0 {
                    continue;
                }
                let row = &mut grad[base + j * n_in..base + (j + 1) * n_in];
                for (g, a) in row.iter_mut().zip(prev) {
                    *g += d * a;
                }
                grad[base + n_in * n_out + j] += d;
            }
            if k == 0 {
                break;
            }
            let weights = &self.params[base..base + n_in * n_out];
            let mut next = vec![0.0; n_in];
            for (j, d) in delta.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                for (i, n) in next.iter_mut().enumerate() {
                    *n += d * weights[j * n_in + i];
                }
            }
            // rectifier derivative, evaluated on the stored post-activation
            for (n, a) in next.iter_mut().zip(prev) {
                if *a <= 0.0 {
                    *n = 0.0;
                }
            }
            delta = next;
        }
        err * err
    }

    /// Gradient of the squared TD error for a single sample.
    pub fn gradient(&self, input: &[f64], action: Layer, target: f64) -> Vec<f64> {
        let mut grad = vec![0.0; self.params.len()];
        self.accumulate_gradient(input, action, target, 1.0, &mut grad);
        grad
    }
}

/// Adam update rule over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
