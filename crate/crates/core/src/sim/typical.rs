//! Strong typicality: count bounds, membership tests and pruned enumeration.

use crate::prob::{JointPmf, ZERO_MASS};
use crate::{Error, Result};

/// Blocklength and per-letter slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    pub n: usize,
    pub delta: f64,
}

impl TypicalityParams {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Configuration("blocklength must be at least 1".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Configuration(format!("typicality slack {delta} must be positive")));
        }
        Ok(Self { n, delta })
    }
}

/// Slack in count units for boundary rounding; absorbs mass noise such as
/// `0.5 + 4e-9`.
const COUNT_SLACK: f64 = 1e-6;

/// Admissible count range per cell: `|N/n - p| <= delta`, and `N = 0` where `p = 0`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Bounds {
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
}

impl Bounds {
    pub fn new(p: &[f64], n: usize, delta: f64) -> Self {
        let nf = n as f64;
        let (mut lo, mut hi) = (Vec::with_capacity(p.len()), Vec::with_capacity(p.len()));
        for &x in p {
            if x <= ZERO_MASS {
                lo.push(0);
                hi.push(0);
            } else {
                lo.push((nf * (x - delta) - COUNT_SLACK).ceil().max(0.0) as u32);
                hi.push((nf * (x + delta) + COUNT_SLACK).floor().min(nf) as u32);
            }
        }
        Self { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn accepts(&self, counts: &[u32]) -> bool {
        counts.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| c >= l && c <= h)
    }

    /// Typicality of a sequence of cell indices.
    pub fn accepts_cells(&self, cells: impl Iterator<Item = usize>) -> bool {
        let mut counts = vec![0u32; self.len()];
        for c in cells {
            counts[c] += 1;
            if counts[c] > self.hi[c] {
                return false;
            }
        }
        self.accepts(&counts)
    }
}

/// Is the tuple of sequences strongly typical for `reference`?
///
/// `seqs[i]` holds letter indices of the `i`-th reference axis. Conditional
/// typicality is joint typicality with the conditioning sequences included.
pub fn is_strongly_typical(seqs: &[&[u8]], reference: &JointPmf, delta: f64) -> Result<bool> {
    let shape = reference.shape();
    if seqs.len() != shape.len() {
        return Err(Error::Input(format!("{} sequences for a {}-axis reference", seqs.len(), shape.len())));
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if n == 0 {
        return Err(Error::Input("sequences must be nonempty".into()));
    }
    if seqs.iter().any(|s| s.len() != n) {
        return Err(Error::Input("sequence lengths differ".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Configuration(format!("typicality slack {delta} must be positive")));
    }
    for (s, &k) in seqs.iter().zip(&shape) {
        if s.iter().any(|&a| a as usize >= k) {
            return Err(Error::Input(format!("letter outside an alphabet of size {k}")));
        }
    }
    let bounds = Bounds::new(reference.mass(), n, delta);
    let cell = |i: usize| seqs.iter().zip(&shape).fold(0usize, |acc, (s, &k)| acc * k + s[i] as usize);
    Ok(bounds.accepts_cells((0..n).map(cell)))
}

/// Enumerates sequences over `k` letters whose letter counts lie in `letters`
/// and whose cells `ctx[i] * k + a` stay within `cells`. `visit` returns
/// `false` to stop early. Fails once more than `cap` sequences are produced.
pub(crate) fn enumerate_typical(
    k: usize,
    letters: &Bounds,
    ctx: &[usize],
    cells: &Bounds,
    cap: usize,
    visit: &mut dyn FnMut(&[u8]) -> bool,
) -> Result<usize> {
    struct St<'a> {
        k: usize,
        letters: &'a Bounds,
        ctx: &'a [usize],
        cells: &'a Bounds,
        cap: usize,
        seq: Vec<u8>,
        letter_counts: Vec<u32>,
        cell_counts: Vec<u32>,
        remaining: Vec<u32>,
        produced: usize,
        stopped: bool,
    }
    fn go(st: &mut St<'_>, visit: &mut dyn FnMut(&[u8]) -> bool) -> Result<()> {
        let d = st.seq.len();
        if d == st.ctx.len() {
            st.produced += 1;
            if st.produced > st.cap {
                return Err(Error::Size { cells: st.produced as u128, cap: st.cap });
            }
            if !visit(&st.seq) {
                st.stopped = true;
            }
            return Ok(());
        }
        let c = st.ctx[d];
        st.remaining[c] -= 1;
        let rem = (st.ctx.len() - d - 1) as u32;
        for a in 0..st.k {
            let cell = c * st.k + a;
            if st.letter_counts[a] >= st.letters.hi[a] || st.cell_counts[cell] >= st.cells.hi[cell] {
                continue;
            }
            st.letter_counts[a] += 1;
            st.cell_counts[cell] += 1;
            let short: u32 = st.letter_counts.iter().zip(&st.letters.lo).map(|(n, l)| l.saturating_sub(*n)).sum();
            if short <= rem && shortfall(st.cells, &st.cell_counts, c, st.k) <= st.remaining[c] {
                st.seq.push(a as u8);
                go(st, visit)?;
                st.seq.pop();
            }
            st.letter_counts[a] -= 1;
            st.cell_counts[cell] -= 1;
            if st.stopped {
                break;
            }
        }
        st.remaining[c] += 1;
        Ok(())
    }
    let nctx = cells.len() / k;
    let mut remaining = vec![0u32; nctx];
    for &c in ctx {
        remaining[c] += 1;
    }
    let zero = vec![0u32; cells.len()];
    if (0..nctx).any(|c| shortfall(cells, &zero, c, k) > remaining[c]) {
        return Ok(0);
    }
    let mut st = St {
        k,
        letters,
        ctx,
        cells,
        cap,
        seq: Vec::with_capacity(ctx.len()),
        letter_counts: vec![0; k],
        cell_counts: zero,
        remaining,
        produced: 0,
        stopped: false,
    };
    go(&mut st, visit)?;
    Ok(st.produced)
}

/// Positions still needed by context `c` to reach its lower bounds.
fn shortfall(bounds: &Bounds, counts: &[u32], c: usize, k: usize) -> u32 {
    (0..k).map(|j| bounds.lo[c * k + j].saturating_sub(counts[c * k + j])).sum()
}

/// Codewords stored flat and indexed in lexicographic order, so that the
/// words sharing a prefix form a contiguous run.
#[derive(Debug, Clone)]
pub(crate) struct Codebook {
    n: usize,
    words: Vec<u8>,
    order: Vec<u32>,
}

impl Codebook {
    pub fn new(n: usize, words: Vec<u8>) -> Self {
        let len = words.len() / n;
        let mut order: Vec<u32> = (0..len as u32).collect();
        order.sort_by(|&a, &b| words[a as usize * n..(a as usize + 1) * n].cmp(&words[b as usize * n..(b as usize + 1) * n]));
        Self { n, words, order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn word(&self, i: usize) -> &[u8] {
        &self.words[i * self.n..(i + 1) * self.n]
    }

    /// The codewords passing `keep`, as a new book.
    pub fn filtered(&self, keep: impl Fn(&[u8]) -> bool) -> Codebook {
        let words = (0..self.len()).filter(|&i| keep(self.word(i))).flat_map(|i| self.word(i).to_vec()).collect();
        Codebook::new(self.n, words)
    }

    /// Codewords `w` for which the cells `ctx[i] * k + w[i]` are typical under
    /// `bounds`, in lexicographic order, at most `limit` of them.
    pub fn typical_with(&self, ctx: &[usize], k: usize, bounds: &Bounds, limit: usize, out: &mut Vec<u32>) {
        let nctx = bounds.len() / k;
        // remaining[c]: positions at or after the current depth with context c.
        let mut remaining = vec![0u32; nctx];
        for &c in ctx {
            remaining[c] += 1;
        }
        let counts = vec![0u32; bounds.len()];
        let feasible = (0..nctx).all(|c| shortfall(bounds, &counts, c, k) <= remaining[c]);
        if feasible {
            let mut counts = counts;
            self.walk(0, 0, self.len(), ctx, k, bounds, limit, &mut counts, &mut remaining, out);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        d: usize,
        lo: usize,
        hi: usize,
        ctx: &[usize],
        k: usize,
        bounds: &Bounds,
        limit: usize,
        counts: &mut [u32],
        remaining: &mut [u32],
        out: &mut Vec<u32>,
    ) {
        if d == self.n {
            for &i in &self.order[lo..hi] {
                if out.len() >= limit {
                    return;
                }
                out.push(i);
            }
            return;
        }
        let c = ctx[d];
        remaining[c] -= 1;
        let mut start = lo;
        while start < hi && out.len() < limit {
            let a = self.words[self.order[start] as usize * self.n + d];
            let end = start + self.order[start..hi].partition_point(|&i| self.words[i as usize * self.n + d] == a);
            let cell = c * k + a as usize;
            if counts[cell] < bounds.hi[cell] {
                counts[cell] += 1;
                // Only context `c` changed, so only its lower bounds need rechecking.
                if shortfall(bounds, counts, c, k) <= remaining[c] {
                    self.walk(d + 1, start, end, ctx, k, bounds, limit, counts, remaining, out);
                }
                counts[cell] -= 1;
            }
            start = end;
        }
        remaining[c] += 1;
    }
}
