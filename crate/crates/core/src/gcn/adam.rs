use crate::gcn::Gradients;
use crate::numerics::DenseMatrix;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// First and second moment estimates for both weight matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    m0: DenseMatrix,
    v0: DenseMatrix,
    m1: DenseMatrix,
    v1: DenseMatrix,
    pub step: u64,
}

impl AdamState {
    pub fn new(w0: &DenseMatrix, w1: &DenseMatrix) -> Self {
        AdamState {
            m0: DenseMatrix::zeros(w0.rows(), w0.cols()),
            v0: DenseMatrix::zeros(w0.rows(), w0.cols()),
            m1: DenseMatrix::zeros(w1.rows(), w1.cols()),
            v1: DenseMatrix::zeros(w1.rows(), w1.cols()),
            step: 0,
        }
    }

    pub(crate) fn update(&mut self, w0: &mut DenseMatrix, w1: &mut DenseMatrix, g: &Gradients, lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - ADAM_BETA1.powi(t);
        let c2 = 1.0 - ADAM_BETA2.powi(t);
        apply(w0, &mut self.m0, &mut self.v0, &g.w0, lr, c1, c2);
        apply(w1, &mut self.m1, &mut self.v1, &g.w1, lr, c1, c2);
    }
}

fn apply(
    w: &mut DenseMatrix,
    m: &mut DenseMatrix,
    v: &mut DenseMatrix,
    g: &DenseMatrix,
    lr: f64,
    c1: f64,
    c2: f64,
) {
    let it = w
        .as_mut_slice()
        .iter_mut()
        .zip(m.as_mut_slice())
        .zip(v.as_mut_slice())
        .zip(g.as_slice());
    for (((w, m), v), &g) in it {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *w -= lr * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
}
