//! Vose alias tables for O(1) draws from a fixed discrete distribution.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    /// Builds a table over `weights`; returns `None` if the slice is empty or
    /// the weights do not have a positive finite sum.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let k = weights.len();
        let total: f64 = weights.iter().sum();
        if k == 0 || !(total.is_finite() && total > 0.0) {
            return None;
        }
        let mut prob: Vec<f64> = weights.iter().map(|w| w * k as f64 / total).collect();
        let mut alias: Vec<usize> = (0..k).collect();
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            alias[s] = l;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers carry probability 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        Some(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_and_degenerate() {
        assert!(AliasTable::new(&[]).is_none());
        assert!(AliasTable::new(&[0.0, 0.0]).is_none());
        let t = AliasTable::new(&[3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| t.sample(&mut rng) == 0));
    }

    #[test]
    fn frequencies_match_weights() {
        let w = [1.0, 2.0, 3.0, 0.0, 4.0];
        let t = AliasTable::new(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 200_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            counts[t.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[3], 0);
        for i in 0..5 {
            let p = w[i] / 10.0;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let f = counts[i] as f64 / draws as f64;
            assert!((f - p).abs() <= 4.0 * se + 1e-12, "bin {i}: {f} vs {p}");
        }
    }
}
