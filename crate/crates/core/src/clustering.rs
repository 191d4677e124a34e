//! Online K-Means over raw pixel vectors.
//!
//! Terminal observations go into a bounded buffer together with the skill
//! that produced them. A new observation that lies farther from its centroid
//! than every other buffered member of that cluster triggers a refit: Lloyd
//! iterations over the whole buffer, starting from the current centroids,
//! followed by relabelling every buffered item.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::gridworld::StateKey;
use crate::FxHashMap;

/// Default buffer size.
pub const DEFAULT_BUFFER: usize = 512;
/// Relative change in within-cluster sum of squares that ends Lloyd's loop.
pub const LLOYD_TOLERANCE: f64 = 1e-6;
pub const LLOYD_MAX_ITERS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct BufferedObs {
    pub pixels: Vec<u8>,
    pub skill: usize,
    pub cluster: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansState {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub buffer: VecDeque<BufferedObs>,
    pub capacity: usize,
    /// Within-cluster sum of squares after each Lloyd iteration of the last
    /// refit.
    pub last_wcss: Vec<f64>,
}

fn sq_dist(v: &[u8], c: &[f64]) -> f64 {
    v.iter()
        .zip(c)
        .map(|(&a, &b)| {
            let d = a as f64 - b;
            d * d
        })
        .sum()
}

impl KMeansState {
    pub fn new(k: usize, capacity: usize) -> Self {
        Self {
            k,
            centroids: Vec::new(),
            buffer: VecDeque::new(),
            capacity,
            last_wcss: Vec::new(),
        }
    }

    /// Nearest centroid by Euclidean distance; ties go to the lowest index.
    /// `None` before the first observation.
    pub fn assign(&self, v: &[u8]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = sq_dist(v, c);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Adds a terminal observation produced by `skill`. Returns its cluster
    /// and whether a refit happened.
    pub fn observe(&mut self, v: &[u8], skill: usize) -> (usize, bool) {
        let fresh = self.centroids.len() < self.k
            && !self.centroids.iter().any(|c| sq_dist(v, c) == 0.0);
        let (cluster, refit) = if fresh {
            self.centroids.push(v.iter().map(|&b| b as f64).collect());
            (self.centroids.len() - 1, false)
        } else {
            let c = self.assign(v).expect("centroids exist after the first observation");
            let d = sq_dist(v, &self.centroids[c]);
            let mut others = self
                .buffer
                .iter()
                .filter(|o| o.cluster == c)
                .map(|o| sq_dist(&o.pixels, &self.centroids[c]))
                .peekable();
            let farthest = others.peek().is_some() && others.all(|od| d > od);
            (c, farthest)
        };
        self.buffer.push_back(BufferedObs {
            pixels: v.to_vec(),
            skill,
            cluster,
        });
        while self.buffer.len() > self.capacity {
            self.buffer.pop_front();
        }
        if refit {
            self.refit();
            let label = self.buffer.back().expect("just pushed").cluster;
            return (label, true);
        }
        (cluster, false)
    }

    fn wcss(&self) -> f64 {
        self.buffer
            .iter()
            .map(|o| sq_dist(&o.pixels, &self.centroids[o.cluster]))
            .sum()
    }

    /// Lloyd iterations over the buffer, then relabelling.
    pub fn refit(&mut self) {
        self.last_wcss.clear();
        if self.centroids.is_empty() {
            return;
        }
        self.relabel();
        let mut prev = self.wcss();
        self.last_wcss.push(prev);
        for _ in 0..LLOYD_MAX_ITERS {
            let dim = self.centroids[0].len();
            let mut sums = alloc::vec![alloc::vec![0.0; dim]; self.centroids.len()];
            let mut sizes = alloc::vec![0usize; self.centroids.len()];
            for o in &self.buffer {
                sizes[o.cluster] += 1;
                for (s, &b) in sums[o.cluster].iter_mut().zip(&o.pixels) {
                    *s += b as f64;
                }
            }
            for (c, (sum, n)) in sums.into_iter().zip(sizes).enumerate() {
                // empty clusters keep their centroid
                if n > 0 {
                    self.centroids[c] = sum.into_iter().map(|x| x / n as f64).collect();
                }
            }
            self.relabel();
            let w = self.wcss();
            self.last_wcss.push(w);
            let done = prev == 0.0 || (prev - w).abs() / prev < LLOYD_TOLERANCE;
            prev = w;
            if done {
                break;
            }
        }
    }

    fn relabel(&mut self) {
        for i in 0..self.buffer.len() {
            let c = self.assign(&self.buffer[i].pixels).expect("centroids exist");
            self.buffer[i].cluster = c;
        }
    }

    /// Visit counts per (cluster, skill) rebuilt from the buffer.
    pub fn relabel_counts(&self, skills: usize) -> FxHashMap<StateKey, Vec<u32>> {
        let mut out: FxHashMap<StateKey, Vec<u32>> = FxHashMap::default();
        for o in &self.buffer {
            let row = out
                .entry(StateKey(o.cluster as u128))
                .or_insert_with(|| alloc::vec![0; skills]);
            if row.len() <= o.skill {
                row.resize(o.skill + 1, 0);
            }
            row[o.skill] += 1;
        }
        out
    }
}
