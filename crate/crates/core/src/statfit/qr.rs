//! Householder QR for tall, small design matrices.

/// Factorization of an `m x p` matrix held as columns.
pub(crate) struct Householder {
    m: usize,
    p: usize,
    /// Unit reflector vectors; `vs[j]` acts on rows `j..m`. `None` when the
    /// column below the diagonal was already zero.
    vs: Vec<Option<Vec<f64>>>,
    /// Upper triangle, row-major `p x p`.
    r: Vec<f64>,
}

impl Householder {
    pub(crate) fn factor(mut cols: Vec<Vec<f64>>) -> Self {
        let p = cols.len();
        let m = cols.first().map_or(0, Vec::len);
        let mut vs = Vec::with_capacity(p);
        for j in 0..p {
            let x = &cols[j][j..];
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                vs.push(None);
                continue;
            }
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x.to_vec();
            v[0] -= alpha;
            let vnorm = v.iter().map(|e| e * e).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                vs.push(None);
                continue;
            }
            v.iter_mut().for_each(|e| *e /= vnorm);
            for col in cols.iter_mut().skip(j) {
                reflect(&v, &mut col[j..]);
            }
            vs.push(Some(v));
        }
        let mut r = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                r[i * p + j] = cols[j][i];
            }
        }
        Householder { m, p, vs, r }
    }

    pub(crate) fn r(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.p + j]
    }

    /// `Q^T y`, length `m`.
    pub(crate) fn qt_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        for (j, v) in self.vs.iter().enumerate() {
            if let Some(v) = v {
                reflect(v, &mut out[j..]);
            }
        }
        out
    }

    /// `Q z` for a full-length `z`.
    pub(crate) fn q_mul(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z.to_vec();
        for (j, v) in self.vs.iter().enumerate().rev() {
            if let Some(v) = v {
                reflect(v, &mut out[j..]);
            }
        }
        out
    }

    /// First `p` columns of `Q`.
    pub(crate) fn thin_q(&self) -> Vec<Vec<f64>> {
        (0..self.p)
            .map(|i| {
                let mut e = vec![0.0; self.m];
                e[i] = 1.0;
                self.q_mul(&e)
            })
            .collect()
    }

    /// Solves `R b = rhs[..p]`.
    pub(crate) fn solve_r(&self, rhs: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut b = vec![0.0; p];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for k in i + 1..p {
                s -= self.r(i, k) * b[k];
            }
            b[i] = s / self.r(i, i);
        }
        b
    }

    /// Squared row norms of `R^{-1}`, i.e. the diagonal of `(R^T R)^{-1}`.
    pub(crate) fn inv_gram_diag(&self) -> Vec<f64> {
        let p = self.p;
        // Column c of R^{-1} solves R x = e_c.
        let mut inv = vec![0.0; p * p];
        for c in 0..p {
            let mut e = vec![0.0; p];
            e[c] = 1.0;
            let x = self.solve_r(&e);
            for i in 0..p {
                inv[i * p + c] = x[i];
            }
        }
        (0..p)
            .map(|i| (0..p).map(|c| inv[i * p + c] * inv[i * p + c]).sum())
            .collect()
    }
}

fn reflect(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}
