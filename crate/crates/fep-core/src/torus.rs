//! Arcs of the discrete torus `Z/nZ` and torus metrics.
//!
//! Arcs are stored as `(start, len)`; `first`/`last` refer to the arc's
//! endpoints in clockwise order, not to integer order, so an arc may wrap
//! through site 0.

use serde::{Deserialize, Serialize};

/// A connected arc of the discrete torus of size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusArc {
    n: usize,
    start: usize,
    len: usize,
}

impl TorusArc {
    /// Arc of `len` sites `start, start+1, ..., start+len-1` (mod `n`).
    pub fn new(n: usize, start: usize, len: usize) -> Self {
        assert!(n > 0, "torus size must be positive");
        assert!(start < n, "start out of range");
        assert!(len <= n, "arc longer than torus");
        TorusArc { n, start, len }
    }

    pub fn full(n: usize) -> Self {
        TorusArc::new(n, 0, n)
    }

    pub fn empty(n: usize) -> Self {
        TorusArc::new(n, 0, 0)
    }

    pub fn torus_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.n
    }

    /// First site of the arc (the arc's `min` in clockwise order).
    pub fn first(&self) -> usize {
        self.start
    }

    /// Last site of the arc (the arc's `max` in clockwise order).
    pub fn last(&self) -> usize {
        assert!(!self.is_empty(), "empty arc has no endpoints");
        (self.start + self.len - 1) % self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        if self.len == 0 {
            return false;
        }
        let off = (x + self.n - self.start) % self.n;
        off < self.len
    }

    /// Complementary arc (possibly empty).
    pub fn complement(&self) -> TorusArc {
        if self.is_full() {
            return TorusArc::empty(self.n);
        }
        let start = (self.start + self.len) % self.n;
        TorusArc::new(self.n, start, self.n - self.len)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let (n, start) = (self.n, self.start);
        (0..self.len).map(move |i| (start + i) % n)
    }
}

/// Distance on the continuous torus `[0,1)`; always in `[0, 1/2]`.
pub fn torus_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}
