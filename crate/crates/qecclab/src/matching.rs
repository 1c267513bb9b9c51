//! Maximum-weight matching in general graphs (Edmonds' blossom method,
//! primal-dual formulation) and a brute-force minimum-weight pairing used
//! as an exactness oracle.
//!
//! The implementation follows the classic O(n³) formulation of Galil's
//! survey: vertices and blossoms carry dual variables, alternating trees
//! are grown from free vertices, and odd cycles are shrunk into blossoms.
//! With `max_cardinality` the solver returns a maximum-cardinality
//! matching of maximum weight, which is how the minimum-weight perfect
//! matching entry point drives it.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Edge list solver state. Weights are integers so all dual arithmetic is
/// exact (vertex duals are premultiplied by two).
struct Solver {
    nvertex: usize,
    edges: Vec<(usize, usize, i64)>,
    maxcardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<usize>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

fn wrap(v: &[usize], index: i64) -> usize {
    if index >= 0 {
        v[index as usize]
    } else {
        v[(v.len() as i64 + index) as usize]
    }
}

impl Solver {
    fn new(nvertex: usize, edges: Vec<(usize, usize, i64)>, maxcardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        for &(i, j, _) in &edges {
            endpoint.push(i);
            endpoint.push(j);
        }
        let mut neighbend = vec![vec![]; nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0; nvertex]);
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(vec![NONE; nvertex]);
        Solver {
            nvertex,
            edges,
            maxcardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![vec![]; 2 * nvertex],
            blossombase,
            blossomendps: vec![vec![]; 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![vec![]; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: vec![],
        }
    }

    /// 2 * slack of edge k (valid only outside blossoms).
    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = vec![];
        if b < self.nvertex {
            leaves.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    leaves.push(t);
                } else {
                    leaves.extend(self.blossom_leaves(t));
                }
            }
        }
        leaves
    }

    /// Label the top-level blossom of w with t, reached through endpoint p.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else {
            // T-blossom: its base's mate becomes an S-vertex
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != NONE);
            let mbase = self.mate[base];
            let ep = self.endpoint[mbase];
            self.assign_label(ep, 1, mbase ^ 1);
        }
    }

    /// Trace back from v and w; return the base of a new blossom, or NONE
    /// if an augmenting path was found instead.
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = vec![];
        let mut base = NONE;
        let mut v = v;
        let mut w = w;
        loop {
            if v == NONE && w == NONE {
                break;
            }
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Shrink the odd cycle through edge k with the given base into a new
    /// S-blossom.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        self.blossomchilds[b] = vec![];
        self.blossomendps[b] = vec![];
        while bv != bb {
            self.blossomparent[bv] = b;
            self.blossomchilds[b].push(bv);
            self.blossomendps[b].push(self.labelend[bv]);
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        self.blossomchilds[b].push(bb);
        self.blossomchilds[b].reverse();
        self.blossomendps[b].reverse();
        self.blossomendps[b].push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            self.blossomchilds[b].push(bw);
            self.blossomendps[b].push(self.labelend[bw] ^ 1);
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        // least-slack edges from the new blossom to other S-blossoms
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        let children = self.blossomchilds[b].clone();
        for bv in children {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.blossom_leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv] = vec![];
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for idx in 0..self.blossombestedges[b].len() {
            let k = self.blossombestedges[b][idx];
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    /// Expand a blossom whose dual reached zero (or at stage end).
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            // relabel the sub-blossoms along the path from the entry child
            // to the base
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&r| r == entrychild)
                .expect("entry child present") as i64;
            let (jstep, endptrick): (i64, usize) = if j & 1 != 0 {
                j -= self.blossomchilds[b].len() as i64;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick ^ 1;
                self.label[self.endpoint[q]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                self.allowedge[wrap(&self.blossomendps[b], j - endptrick as i64) / 2] = true;
                j += jstep;
                p = wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // the base keeps label T without propagating through its mate
            let bv = wrap(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while wrap(&self.blossomchilds[b], j) != entrychild {
                let bv = wrap(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut v = NONE;
                for t in self.blossom_leaves(bv) {
                    v = t;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if v != NONE && self.label[v] != 0 {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossombase[b] = NONE;
        self.bestedge[b] = NONE;
        self.blossomchilds[b] = vec![];
        self.blossomendps[b] = vec![];
        self.blossombestedges[b] = vec![];
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges along the path from v to the base of b.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b]
            .iter()
            .position(|&r| r == t)
            .expect("child present");
        let mut j = i as i64;
        let (jstep, endptrick): (i64, usize) = if i & 1 != 0 {
            j -= self.blossomchilds[b].len() as i64;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let mut t = wrap(&self.blossomchilds[b], j);
            let p = wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
            if t >= self.nvertex {
                let ep = self.endpoint[p];
                self.augment_blossom(t, ep);
            }
            j += jstep;
            t = wrap(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                let ep = self.endpoint[p ^ 1];
                self.augment_blossom(t, ep);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Augment along the path through zero-slack edge k between two trees.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (start, start_p) in [(v, 2 * k + 1), (w, 2 * k)] {
            let mut s = start;
            let mut p = start_p;
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Dual-feasibility and complementary-slackness check of the result.
    fn verify_optimum(&self) {
        let vdualoffset = if self.maxcardinality {
            (-self.dualvar[..self.nvertex].iter().min().copied().unwrap_or(0)).max(0)
        } else {
            0
        };
        for k in 0..self.edges.len() {
            let (i, j, _) = self.edges[k];
            let mut s = self.slack(k);
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != NONE {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != NONE {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[bi];
            }
            assert!(s >= 0, "negative slack on edge {k}");
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert_eq!(s, 0, "matched edge {k} has nonzero slack");
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] != NONE || self.dualvar[v] + vdualoffset == 0);
        }
        for b in self.nvertex..2 * self.nvertex {
            if self.blossombase[b] != NONE && self.dualvar[b] > 0 {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert_eq!(self.mate[self.endpoint[p]], p ^ 1);
                        assert_eq!(self.mate[self.endpoint[p ^ 1]], p);
                    }
                }
            }
        }
    }

    fn solve(mut self) -> Vec<usize> {
        if self.edges.is_empty() {
            return vec![];
        }
        for _stage in 0..self.nvertex {
            self.label = vec![0; 2 * self.nvertex];
            self.bestedge = vec![NONE; 2 * self.nvertex];
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b] = vec![];
            }
            self.allowedge = vec![false; self.edges.len()];
            self.queue = vec![];
            for v in 0..self.nvertex {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while !self.queue.is_empty() && !augmented {
                    let v = self.queue.pop().unwrap();
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // no augmenting path: pump slack out of the duals
                let mut deltatype = -1;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.maxcardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().min().copied().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let d = self.slack(self.bestedge[b]) / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // max-cardinality optimum; final clamp for verification
                    debug_assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().min().copied().unwrap().max(0);
                }
                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        other => unreachable!("vertex label {other}"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            other => unreachable!("blossom label {other}"),
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    other => unreachable!("delta type {other}"),
                }
            }
            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        if cfg!(debug_assertions) {
            self.verify_optimum();
        }
        let mut mate = self.mate.clone();
        for v in 0..self.nvertex {
            if mate[v] != NONE {
                mate[v] = self.endpoint[mate[v]];
            }
        }
        for v in 0..self.nvertex {
            debug_assert!(mate[v] == NONE || mate[mate[v]] == v);
        }
        mate
    }
}

/// Maximum-weight matching over `nvertex` vertices. Returns the partner of
/// each vertex, or `None` for unmatched vertices. With `max_cardinality`,
/// only maximum-cardinality matchings are candidates.
pub fn max_weight_matching(
    nvertex: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> Vec<Option<usize>> {
    for &(i, j, _) in edges {
        assert!(i != j && i < nvertex && j < nvertex, "bad edge ({i}, {j})");
    }
    let mate = Solver::new(nvertex, edges.to_vec(), max_cardinality).solve();
    let mut out = vec![None; nvertex];
    for (v, &m) in mate.iter().enumerate() {
        if m != NONE {
            out[v] = Some(m);
        }
    }
    out
}

/// Exact minimum-weight perfect matching on a complete graph given a
/// symmetric weight matrix. Solved as maximum-cardinality maximum-weight
/// matching on the complement weights.
pub fn min_weight_pairing(weights: &[Vec<i64>]) -> Result<(i64, Vec<(usize, usize)>)> {
    let n = weights.len();
    if n % 2 != 0 {
        return Err(Error::Construction(format!("cannot pair an odd number of nodes ({n})")));
    }
    if n == 0 {
        return Ok((0, vec![]));
    }
    let mut wmax = i64::MIN;
    for i in 0..n {
        if weights[i].len() != n {
            return Err(Error::Construction("weight matrix is not square".into()));
        }
        for j in i + 1..n {
            wmax = wmax.max(weights[i][j]);
        }
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, wmax - weights[i][j]));
        }
    }
    let mate = max_weight_matching(n, &edges, true);
    let mut pairs = Vec::with_capacity(n / 2);
    let mut total = 0i64;
    for (i, &m) in mate.iter().enumerate() {
        let j = m.ok_or_else(|| Error::Construction(format!("vertex {i} left unmatched")))?;
        if i < j {
            pairs.push((i, j));
            total += weights[i][j];
        }
    }
    Ok((total, pairs))
}

/// Exhaustive minimum over all perfect pairings; (2m−1)!! combinations.
pub fn min_weight_pairing_bruteforce(weights: &[Vec<i64>]) -> Result<(i64, Vec<(usize, usize)>)> {
    let n = weights.len();
    if n % 2 != 0 {
        return Err(Error::Construction(format!("cannot pair an odd number of nodes ({n})")));
    }
    if n > 16 {
        return Err(Error::Construction(format!("brute force limited to 16 nodes, got {n}")));
    }
    fn recurse(
        weights: &[Vec<i64>],
        unmatched: &mut Vec<usize>,
        current: &mut Vec<(usize, usize)>,
        acc: i64,
        best: &mut (i64, Vec<(usize, usize)>),
    ) {
        if unmatched.is_empty() {
            if acc < best.0 {
                *best = (acc, current.clone());
            }
            return;
        }
        let a = unmatched[0];
        for idx in 1..unmatched.len() {
            let b = unmatched[idx];
            let mut rest: Vec<usize> = unmatched
                .iter()
                .copied()
                .filter(|&v| v != a && v != b)
                .collect();
            current.push((a, b));
            recurse(weights, &mut rest, current, acc + weights[a][b], best);
            current.pop();
        }
    }
    if n == 0 {
        return Ok((0, vec![]));
    }
    let mut best = (i64::MAX, vec![]);
    let mut all: Vec<usize> = (0..n).collect();
    recurse(weights, &mut all, &mut Vec::new(), 0, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mates(edges: &[(usize, usize, i64)], nv: usize, maxcard: bool) -> Vec<Option<usize>> {
        max_weight_matching(nv, edges, maxcard)
    }

    #[test]
    fn trivial_graphs() {
        assert_eq!(max_weight_matching(0, &[], false), vec![]);
        assert_eq!(mates(&[(0, 1, 1)], 2, false), vec![Some(1), Some(0)]);
        assert_eq!(
            mates(&[(1, 2, 10), (2, 3, 11)], 4, false),
            vec![None, None, Some(3), Some(2)]
        );
    }

    #[test]
    fn cardinality_changes_answer() {
        let edges = [(1, 2, 5), (2, 3, 11), (3, 4, 5)];
        assert_eq!(mates(&edges, 5, false), vec![None, None, Some(3), Some(2), None]);
        assert_eq!(
            mates(&edges, 5, true),
            vec![None, Some(2), Some(1), Some(4), Some(3)]
        );
    }

    #[test]
    fn negative_weights() {
        let edges = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mates(&edges, 5, false), vec![None, Some(2), Some(1), None, None]);
        assert_eq!(
            mates(&edges, 5, true),
            vec![None, Some(3), Some(4), Some(1), Some(2)]
        );
    }

    #[test]
    fn s_blossom_augmentation() {
        let edges = [(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)];
        assert_eq!(
            mates(&edges, 5, false),
            vec![None, Some(2), Some(1), Some(4), Some(3)]
        );
        let edges = [(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)];
        assert_eq!(
            mates(&edges, 7, false),
            vec![None, Some(6), Some(3), Some(2), Some(5), Some(4), Some(1)]
        );
    }

    #[test]
    fn t_blossom_expansion_cases() {
        // create blossom, relabel as T in more than one way, expand, augment
        let edges = [
            (1, 2, 9),
            (1, 3, 8),
            (2, 3, 10),
            (1, 4, 5),
            (4, 5, 4),
            (1, 6, 3),
        ];
        assert_eq!(
            mates(&edges, 7, false),
            vec![None, Some(6), Some(3), Some(2), Some(5), Some(4), Some(1)]
        );
        let edges = [
            (1, 2, 9),
            (1, 3, 8),
            (2, 3, 10),
            (1, 4, 5),
            (4, 5, 3),
            (3, 6, 4),
        ];
        assert_eq!(
            mates(&edges, 7, false),
            vec![None, Some(2), Some(1), Some(6), Some(5), Some(4), Some(3)]
        );
    }

    #[test]
    fn nested_s_blossom_expands() {
        // create nested S-blossom, augment, expand recursively
        let edges = [
            (1, 2, 8),
            (1, 3, 8),
            (2, 3, 10),
            (2, 4, 12),
            (3, 5, 12),
            (4, 5, 14),
            (4, 6, 12),
            (5, 7, 12),
            (6, 7, 14),
            (7, 8, 12),
        ];
        assert_eq!(
            mates(&edges, 9, false),
            vec![
                None,
                Some(2),
                Some(1),
                Some(5),
                Some(6),
                Some(3),
                Some(4),
                Some(8),
                Some(7)
            ]
        );
    }

    #[test]
    fn brute_force_finds_non_greedy_optimum() {
        // greedy grabs the 1-weight edge and pays 100; optimum avoids it
        let w = vec![
            vec![0, 1, 10, 100],
            vec![1, 0, 100, 10],
            vec![10, 100, 0, 1000],
            vec![100, 10, 1000, 0],
        ];
        let (cost, pairs) = min_weight_pairing_bruteforce(&w).unwrap();
        assert_eq!(cost, 20);
        assert_eq!(pairs, vec![(0, 2), (1, 3)]);
        let (blossom_cost, _) = min_weight_pairing(&w).unwrap();
        assert_eq!(blossom_cost, 20);
    }

    #[test]
    fn pairing_matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for trial in 0..400 {
            let m = 1 + trial % 6; // 2..=12 nodes
            let n = 2 * m;
            let mut w = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.random_range(0..50i64);
                    w[i][j] = v;
                    w[j][i] = v;
                }
            }
            let (exact, _) = min_weight_pairing_bruteforce(&w).unwrap();
            let (got, pairs) = min_weight_pairing(&w).unwrap();
            assert_eq!(got, exact, "instance {trial}");
            assert_eq!(pairs.len(), m);
            let mut seen = vec![false; n];
            for &(a, b) in &pairs {
                assert!(!seen[a] && !seen[b]);
                seen[a] = true;
                seen[b] = true;
            }
        }
    }

    #[test]
    fn odd_counts_are_rejected() {
        let w = vec![vec![0; 3]; 3];
        assert!(min_weight_pairing(&w).is_err());
        assert!(min_weight_pairing_bruteforce(&w).is_err());
    }

    #[test]
    fn empty_pairing() {
        assert_eq!(min_weight_pairing(&[]).unwrap(), (0, vec![]));
        assert_eq!(min_weight_pairing_bruteforce(&[]).unwrap(), (0, vec![]));
    }
}
