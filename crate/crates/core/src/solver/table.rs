//! Fixed-size transposition table holding exact depth-bounded facts.
//!
//! Each entry records, for one position, the smallest search depth known to
//! force a win (`win_le`, 0 = unknown) and the largest depth known not to
//! (`nowin_ge`). Both facts are monotone in depth, so any entry that survives
//! is exact; eviction only forgets.

#[derive(Clone, Copy, Default)]
struct Entry {
    s: u64,
    o: u64,
    work: u32,
    win_le: u8,
    nowin_ge: u8,
}

impl Entry {
    fn is_empty(&self) -> bool {
        self.win_le == 0 && self.nowin_ge == 0
    }

    fn matches(&self, s: u64, o: u64) -> bool {
        !self.is_empty() && self.s == s && self.o == o
    }
}

pub(crate) struct Table {
    buckets: Vec<[Entry; 2]>,
    shift: u32,
}

/// What the table knows about a position at a given depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Probe {
    Win,
    NoWin,
    Miss,
}

impl Table {
    pub fn new(bits: u32) -> Self {
        let bits = bits.clamp(4, 30);
        Table { buckets: vec![[Entry::default(); 2]; 1 << bits], shift: 64 - bits }
    }

    fn index(&self, s: u64, o: u64) -> usize {
        let h = (s ^ o.rotate_left(29) ^ 0x5851_F42D_4C95_7F2D).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        (h >> self.shift) as usize
    }

    pub fn probe(&self, s: u64, o: u64, depth: u8) -> Probe {
        let bucket = &self.buckets[self.index(s, o)];
        for e in bucket {
            if e.matches(s, o) {
                if e.win_le != 0 && depth >= e.win_le {
                    return Probe::Win;
                }
                if depth <= e.nowin_ge {
                    return Probe::NoWin;
                }
            }
        }
        Probe::Miss
    }

    /// Record that the position is a win (`win`) or not at `depth`.
    pub fn store(&mut self, s: u64, o: u64, depth: u8, win: bool, work: u64) {
        let idx = self.index(s, o);
        let bucket = &mut self.buckets[idx];
        let work = work.min(u32::MAX as u64) as u32;
        for e in bucket.iter_mut() {
            if e.matches(s, o) {
                if win {
                    e.win_le = if e.win_le == 0 { depth } else { e.win_le.min(depth) };
                } else {
                    e.nowin_ge = e.nowin_ge.max(depth);
                }
                e.work = e.work.max(work);
                return;
            }
        }
        let fresh = Entry { s, o, work, win_le: if win { depth } else { 0 }, nowin_ge: if win { 0 } else { depth } };
        if fresh.is_empty() {
            return;
        }
        if bucket[0].is_empty() || work >= bucket[0].work {
            bucket[1] = bucket[0];
            bucket[0] = fresh;
        } else {
            bucket[1] = fresh;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::engine::INF;

    #[test]
    fn facts_are_monotone() {
        let mut t = Table::new(8);
        t.store(3, 4, 5, false, 10);
        assert_eq!(t.probe(3, 4, 5), Probe::NoWin);
        assert_eq!(t.probe(3, 4, 2), Probe::NoWin);
        assert_eq!(t.probe(3, 4, 6), Probe::Miss);
        t.store(3, 4, 7, true, 10);
        assert_eq!(t.probe(3, 4, INF), Probe::Win);
        assert_eq!(t.probe(3, 4, 6), Probe::Miss);
    }

    #[test]
    fn different_keys_do_not_collide() {
        let mut t = Table::new(4);
        for s in 0..200u64 {
            t.store(s, 0, INF, true, s);
        }
        for s in 0..200u64 {
            assert_ne!(t.probe(s, 1, INF), Probe::Win);
        }
    }
}
