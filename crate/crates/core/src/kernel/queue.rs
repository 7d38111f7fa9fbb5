//! Addressable binary min-heap keyed by vertex.
//!
//! Every vertex appears at most once; `remove` and `update` are O(log n) thanks
//! to a position index. Ties on equal keys go to the smaller vertex id.

use std::cmp::Ordering;

use super::Key;
use crate::graph::VertexId;

const ABSENT: usize = usize::MAX;

#[derive(Clone, Debug, Default)]
pub struct RepairQueue {
    heap: Vec<(Key, VertexId)>,
    pos: Vec<usize>,
}

#[inline]
fn less(a: &(Key, VertexId), b: &(Key, VertexId)) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

impl RepairQueue {
    pub fn with_vertices(n: usize) -> Self {
        RepairQueue { heap: Vec::new(), pos: vec![ABSENT; n] }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.pos.get(v.0).is_some_and(|&p| p != ABSENT)
    }

    /// Key of `v` if queued.
    pub fn key_of(&self, v: VertexId) -> Option<Key> {
        match self.pos.get(v.0) {
            Some(&p) if p != ABSENT => Some(self.heap[p].0),
            _ => None,
        }
    }

    /// Minimum key, `(∞, ∞)` when empty.
    pub fn top_key(&self) -> Key {
        self.heap.first().map(|e| e.0).unwrap_or(Key::INFINITE)
    }

    pub fn peek(&self) -> Option<(VertexId, Key)> {
        self.heap.first().map(|&(k, v)| (v, k))
    }

    fn grow(&mut self, v: VertexId) {
        if v.0 >= self.pos.len() {
            self.pos.resize(v.0 + 1, ABSENT);
        }
    }

    /// Inserts `v`, or changes its key if already present.
    pub fn insert(&mut self, v: VertexId, key: Key) {
        self.grow(v);
        let p = self.pos[v.0];
        if p != ABSENT {
            let old = self.heap[p].0;
            self.heap[p].0 = key;
            if key < old {
                self.sift_up(p);
            } else {
                self.sift_down(p);
            }
            return;
        }
        self.heap.push((key, v));
        let i = self.heap.len() - 1;
        self.pos[v.0] = i;
        self.sift_up(i);
    }

    pub fn pop(&mut self) -> Option<(VertexId, Key)> {
        if self.heap.is_empty() {
            return None;
        }
        let (key, v) = self.heap[0];
        self.remove_at(0);
        Some((v, key))
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        match self.pos.get(v.0) {
            Some(&p) if p != ABSENT => {
                self.remove_at(p);
                true
            }
            _ => false,
        }
    }

    pub fn clear(&mut self) {
        for &(_, v) in &self.heap {
            self.pos[v.0] = ABSENT;
        }
        self.heap.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Key)> + '_ {
        self.heap.iter().map(|&(k, v)| (v, k))
    }

    fn remove_at(&mut self, i: usize) {
        let last = self.heap.len() - 1;
        self.swap(i, last);
        let (_, v) = self.heap.pop().unwrap();
        self.pos[v.0] = ABSENT;
        if i < self.heap.len() {
            self.sift_down(i);
            self.sift_up(i);
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i].1 .0] = i;
        self.pos[self.heap[j].1 .0] = j;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if less(&self.heap[i], &self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            let r = l + 1;
            let mut best = i;
            if l < n && less(&self.heap[l], &self.heap[best]) {
                best = l;
            }
            if r < n && less(&self.heap[r], &self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }
}
