//! Discrete gradient on a lower-star cubical filtration and the Morse
//! complex it induces.
//!
//! A cube is stored as (top vertex, offset code). The offset w ∈ {−1,0,1}^k
//! lists, per axis, whether the cube extends from the top vertex forwards,
//! backwards or not at all; it is packed in base 3.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::grid::{Grid, MAX_K};

pub(crate) type Offset = [i8; MAX_K];

pub(crate) fn encode(w: &Offset, k: usize) -> u16 {
    let mut c = 0u16;
    for i in (0..k).rev() {
        c = c * 3 + (w[i] + 1) as u16;
    }
    c
}

pub(crate) fn decode(mut c: u16, k: usize) -> Offset {
    let mut w = [0i8; MAX_K];
    for wi in w.iter_mut().take(k) {
        *wi = (c % 3) as i8 - 1;
        c /= 3;
    }
    w
}

fn dim(w: &Offset) -> usize {
    w.iter().filter(|&&d| d != 0).count()
}

const NO_PARTNER: u16 = u16::MAX;

pub(crate) fn vertex_code(k: usize) -> u16 {
    encode(&[0; MAX_K], k)
}

#[derive(Debug, Clone, Copy)]
struct Classified {
    code: u16,
    time: u16,
    /// Code of the paired cell in the same lower star, or NO_PARTNER.
    partner: u16,
}

/// Classification of one lower star, sorted by code.
#[derive(Debug, Clone, Default)]
pub(crate) struct LowerStar {
    cells: Vec<Classified>,
}

impl LowerStar {
    fn get(&self, code: u16) -> Classified {
        let i = self
            .cells
            .binary_search_by_key(&code, |c| c.code)
            .expect("cell belongs to this lower star");
        self.cells[i]
    }
}

pub(crate) struct Filtration<'a> {
    pub grid: &'a Grid,
    /// Rank of each vertex in the (value, index) order; u32::MAX if the
    /// vertex lies above the cutoff.
    pub rank: Vec<u32>,
}

/// Critical cell found by the lower-star sweep.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Critical {
    pub vertex: usize,
    pub code: u16,
    pub dim: usize,
}

struct Scratch {
    /// Local index of each offset code in the current lower star.
    slot: Vec<i32>,
}

impl<'a> Filtration<'a> {
    pub fn new(grid: &'a Grid, values: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..values.len() as u32)
            .filter(|&v| values[v as usize].is_finite())
            .collect();
        order.sort_unstable_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
        let mut rank = vec![u32::MAX; values.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        Self { grid, rank }
    }

    fn vertex_at(&self, base: usize, w: &Offset, subset: u32) -> Option<usize> {
        let mut v = base;
        for (i, &d) in w.iter().enumerate().take(self.grid.k) {
            if d != 0 && subset & (1 << i) != 0 {
                v = self.grid.step(v, i, d)?;
            }
        }
        Some(v)
    }

    fn support_mask(w: &Offset, k: usize) -> u32 {
        (0..k).filter(|&i| w[i] != 0).fold(0, |m, i| m | (1 << i))
    }

    /// Vertex ranks of a cube at `top` with offset `w`, sorted descending.
    fn key(&self, top: usize, w: &Offset) -> Vec<u32> {
        let supp = Self::support_mask(w, self.grid.k);
        let mut ranks = Vec::with_capacity(1 << supp.count_ones());
        let mut s = supp;
        loop {
            let v = self.vertex_at(top, w, s).expect("cube lies in the grid");
            ranks.push(self.rank[v]);
            if s == 0 {
                break;
            }
            s = (s - 1) & supp;
        }
        ranks.sort_unstable_by(|a, b| b.cmp(a));
        ranks
    }

    /// Offsets of the cubes whose top vertex is `x`, in generation order.
    fn lower_star_offsets(&self, x: usize, scratch: &mut Scratch) -> Vec<Offset> {
        let k = self.grid.k;
        let rx = self.rank[x];
        let mut cells: Vec<Offset> = Vec::new();
        if rx == u32::MAX {
            return cells;
        }
        let lower = |v: Option<usize>| v.is_some_and(|v| self.rank[v] < rx);
        // breadth first by support, extending only on axes above the last one
        let mut frontier: Vec<(Offset, usize)> = Vec::new();
        for i in 0..k {
            for d in [-1i8, 1] {
                if lower(self.grid.step(x, i, d)) {
                    let mut w = [0i8; MAX_K];
                    w[i] = d;
                    scratch.slot[encode(&w, k) as usize] = cells.len() as i32;
                    cells.push(w);
                    frontier.push((w, i));
                }
            }
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (w, last) in &frontier {
                for j in last + 1..k {
                    for d in [-1i8, 1] {
                        let mut w2 = *w;
                        w2[j] = d;
                        let faces_in = (0..k).filter(|&i| w2[i] != 0).all(|i| {
                            let mut f = w2;
                            f[i] = 0;
                            scratch.slot[encode(&f, k) as usize] >= 0
                        });
                        if faces_in && lower(self.vertex_at(x, &w2, u32::MAX)) {
                            scratch.slot[encode(&w2, k) as usize] = cells.len() as i32;
                            cells.push(w2);
                            next.push((w2, j));
                        }
                    }
                }
            }
            frontier = next;
        }
        cells
    }

    /// Gradient pairing inside the lower star of `x`.
    ///
    /// Returns the classification sorted by code and the critical cells in
    /// the order they were declared.
    fn process(&self, x: usize, scratch: &mut Scratch) -> (LowerStar, Vec<Critical>) {
        let k = self.grid.k;
        let offsets = self.lower_star_offsets(x, scratch);
        let n = offsets.len();
        let codes: Vec<u16> = offsets.iter().map(|w| encode(w, k)).collect();
        let mut time = vec![u16::MAX; n];
        let mut partner = vec![NO_PARTNER; n];
        let mut critical = Vec::new();
        let mut clock: u16 = 1;

        let reset = |scratch: &mut Scratch| {
            for &c in &codes {
                scratch.slot[c as usize] = -1;
            }
        };

        if n == 0 {
            critical.push(Critical {
                vertex: x,
                code: vertex_code(k),
                dim: 0,
            });
            let star = LowerStar {
                cells: vec![Classified {
                    code: vertex_code(k),
                    time: 0,
                    partner: NO_PARTNER,
                }],
            };
            return (star, critical);
        }

        let keys: Vec<Vec<u32>> = offsets.iter().map(|w| self.key(x, w)).collect();
        let faces = |i: usize, scratch: &Scratch| -> Vec<usize> {
            let w = offsets[i];
            (0..k)
                .filter(|&a| w[a] != 0)
                .filter_map(|a| {
                    let mut f = w;
                    f[a] = 0;
                    let s = scratch.slot[encode(&f, k) as usize];
                    (s >= 0).then_some(s as usize)
                })
                .collect()
        };
        let cofaces = |i: usize, scratch: &Scratch| -> Vec<usize> {
            let w = offsets[i];
            let mut out = Vec::new();
            for a in (0..k).filter(|&a| w[a] == 0) {
                for d in [-1i8, 1] {
                    let mut c = w;
                    c[a] = d;
                    let s = scratch.slot[encode(&c, k) as usize];
                    if s >= 0 {
                        out.push(s as usize);
                    }
                }
            }
            out
        };
        let unpaired_faces = |i: usize, time: &[u16], scratch: &Scratch| -> Vec<usize> {
            faces(i, scratch)
                .into_iter()
                .filter(|&f| time[f] == u16::MAX)
                .collect()
        };

        let mut pq_zero: BinaryHeap<Reverse<(Vec<u32>, usize)>> = BinaryHeap::new();
        let mut pq_one: BinaryHeap<Reverse<(Vec<u32>, usize)>> = BinaryHeap::new();

        // pair x with its steepest edge
        let delta = (0..n)
            .filter(|&i| dim(&offsets[i]) == 1)
            .min_by(|&a, &b| keys[a].cmp(&keys[b]))
            .expect("a non-empty lower star has an edge");
        let x_partner = codes[delta];
        time[delta] = clock;
        clock += 1;
        partner[delta] = vertex_code(k);
        for i in 0..n {
            if i != delta && dim(&offsets[i]) == 1 {
                pq_zero.push(Reverse((keys[i].clone(), i)));
            }
        }
        for c in cofaces(delta, scratch) {
            if unpaired_faces(c, &time, scratch).len() == 1 {
                pq_one.push(Reverse((keys[c].clone(), c)));
            }
        }

        loop {
            while let Some(Reverse((_, a))) = pq_one.pop() {
                if time[a] != u16::MAX {
                    continue;
                }
                let free = unpaired_faces(a, &time, scratch);
                if free.is_empty() {
                    pq_zero.push(Reverse((keys[a].clone(), a)));
                    continue;
                }
                let f = free[0];
                time[f] = clock;
                time[a] = clock + 1;
                clock += 2;
                partner[f] = codes[a];
                partner[a] = codes[f];
                for c in cofaces(a, scratch).into_iter().chain(cofaces(f, scratch)) {
                    if time[c] == u16::MAX && unpaired_faces(c, &time, scratch).len() == 1 {
                        pq_one.push(Reverse((keys[c].clone(), c)));
                    }
                }
            }
            let Some(g) = std::iter::from_fn(|| pq_zero.pop())
                .map(|Reverse((_, g))| g)
                .find(|&g| time[g] == u16::MAX)
            else {
                break;
            };
            time[g] = clock;
            clock += 1;
            critical.push(Critical {
                vertex: x,
                code: codes[g],
                dim: dim(&offsets[g]),
            });
            for c in cofaces(g, scratch) {
                if time[c] == u16::MAX && unpaired_faces(c, &time, scratch).len() == 1 {
                    pq_one.push(Reverse((keys[c].clone(), c)));
                }
            }
        }
        debug_assert!(time.iter().all(|&t| t != u16::MAX), "lower star fully classified");
        reset(scratch);

        let mut cells: Vec<Classified> = (0..n)
            .map(|i| Classified {
                code: codes[i],
                time: time[i],
                partner: partner[i],
            })
            .collect();
        cells.push(Classified {
            code: vertex_code(k),
            time: 0,
            partner: x_partner,
        });
        cells.sort_unstable_by_key(|c| c.code);
        (LowerStar { cells }, critical)
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            slot: vec![-1; 3usize.pow(self.grid.k as u32)],
        }
    }

    /// Critical cells in filtration order.
    pub fn critical_cells(&self) -> Vec<Critical> {
        let mut scratch = self.scratch();
        let mut order: Vec<usize> = (0..self.rank.len()).filter(|&v| self.rank[v] != u32::MAX).collect();
        order.sort_unstable_by_key(|&v| self.rank[v]);
        let mut out = Vec::new();
        for x in order {
            out.extend(self.process(x, &mut scratch).1);
        }
        out
    }

    /// Normal form (top vertex, offset) of the cube spanned from `base`.
    fn normalize(&self, base: usize, w: &Offset) -> (usize, Offset) {
        let k = self.grid.k;
        let supp = Self::support_mask(w, k);
        let mut best = (base, 0u32, self.rank[base]);
        let mut s = supp;
        while s != 0 {
            let v = self.vertex_at(base, w, s).expect("cube lies in the grid");
            if self.rank[v] > best.2 {
                best = (v, s, self.rank[v]);
            }
            s = (s - 1) & supp;
        }
        let mut w2 = *w;
        for (i, wi) in w2.iter_mut().enumerate().take(k) {
            if best.1 & (1 << i) != 0 {
                *wi = -*wi;
            }
        }
        (best.0, w2)
    }

    /// Facets of the cube (top, w) in normal form.
    fn facets(&self, top: usize, w: &Offset) -> Vec<(usize, u16)> {
        let k = self.grid.k;
        let mut out = Vec::new();
        for i in (0..k).filter(|&i| w[i] != 0) {
            let mut f = *w;
            f[i] = 0;
            out.push((top, encode(&f, k)));
            let far = self.grid.step(top, i, w[i]).expect("cube lies in the grid");
            let (t, g) = self.normalize(far, &f);
            out.push((t, encode(&g, k)));
        }
        out
    }

    /// Boundary of every critical cell in the Morse complex, as indices into
    /// `critical`.
    pub fn morse_boundary(&self, critical: &[Critical]) -> Vec<Vec<u32>> {
        let k = self.grid.k;
        let index: HashMap<(usize, u16), u32> = critical
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.vertex, c.code), i as u32))
            .collect();
        let mut cache: HashMap<usize, LowerStar> = HashMap::new();
        let mut scratch = self.scratch();
        let mut columns = Vec::with_capacity(critical.len());
        for c in critical {
            let mut col = Vec::new();
            if c.dim > 0 {
                let mut parity: HashMap<(usize, u16), bool> = HashMap::new();
                let mut heap: BinaryHeap<(u32, u16, usize, u16)> = BinaryHeap::new();
                let toggle = |cell: (usize, u16),
                                  parity: &mut HashMap<(usize, u16), bool>,
                                  heap: &mut BinaryHeap<(u32, u16, usize, u16)>,
                                  cache: &mut HashMap<usize, LowerStar>,
                                  scratch: &mut Scratch| {
                    let star = cache
                        .entry(cell.0)
                        .or_insert_with(|| self.process(cell.0, scratch).0);
                    let t = star.get(cell.1).time;
                    let p = parity.entry(cell).or_insert(false);
                    *p = !*p;
                    if *p {
                        heap.push((self.rank[cell.0], t, cell.0, cell.1));
                    }
                };
                let w = decode(c.code, k);
                for f in self.facets(c.vertex, &w) {
                    toggle(f, &mut parity, &mut heap, &mut cache, &mut scratch);
                }
                while let Some((_, _, v, code)) = heap.pop() {
                    let cell = (v, code);
                    if !parity.get(&cell).copied().unwrap_or(false) {
                        continue;
                    }
                    parity.insert(cell, false);
                    if let Some(&i) = index.get(&cell) {
                        col.push(i);
                        continue;
                    }
                    let info = cache[&v].get(code);
                    assert_ne!(info.partner, NO_PARTNER, "unlisted critical cell");
                    let fw = decode(code, k);
                    let pw = decode(info.partner, k);
                    if dim(&pw) > dim(&fw) {
                        for g in self.facets(v, &pw) {
                            if g != cell {
                                toggle(g, &mut parity, &mut heap, &mut cache, &mut scratch);
                            }
                        }
                    }
                }
            }
            col.sort_unstable();
            columns.push(col);
        }
        columns
    }
}
