//! Directed web graphs and their hyperlink matrices.
//!
//! Page ids are 0-based everywhere. A [`WebGraph`] never contains
//! self-loops, so the derived [`LinkMatrix`] always has a zero diagonal.

use std::collections::VecDeque;
use std::ops::Deref;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;
use crate::{Error, Result};

/// Fraction of all pages that must link to each hub in [`random_web`].
pub const HUB_IN_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebGraph {
    out_links: Vec<Vec<usize>>,
    in_links: Vec<Vec<usize>>,
}

impl WebGraph {
    /// Builds a graph from an edge iterator. Duplicate edges collapse;
    /// self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n < 2 {
            return Err(Error::validation(format!("a web needs at least 2 pages, got {n}")));
        }
        let mut out_links = vec![Vec::new(); n];
        for (src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::validation(format!(
                    "edge {src} -> {dst} references a page outside 0..{n}"
                )));
            }
            if src == dst {
                return Err(Error::validation(format!("self-loop on page {src}")));
            }
            out_links[src].push(dst);
        }
        Ok(Self::from_out_links(out_links))
    }

    fn from_out_links(mut out_links: Vec<Vec<usize>>) -> Self {
        let n = out_links.len();
        let mut in_links = vec![Vec::new(); n];
        for (src, outs) in out_links.iter_mut().enumerate() {
            outs.sort_unstable();
            outs.dedup();
            for &dst in outs.iter() {
                in_links[dst].push(src);
            }
        }
        WebGraph { out_links, in_links }
    }

    pub fn page_count(&self) -> usize {
        self.out_links.len()
    }

    pub fn out_links(&self, page: usize) -> &[usize] {
        &self.out_links[page]
    }

    pub fn in_links(&self, page: usize) -> &[usize] {
        &self.in_links[page]
    }

    pub fn out_degree(&self, page: usize) -> usize {
        self.out_links[page].len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_links.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_links[src].binary_search(&dst).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_links
            .iter()
            .enumerate()
            .flat_map(|(src, outs)| outs.iter().map(move |&dst| (src, dst)))
    }

    pub fn dangling_pages(&self) -> Vec<usize> {
        (0..self.page_count()).filter(|&p| self.out_links[p].is_empty()).collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; adj.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        queue.push_back(v);
                    }
                }
            }
            count == adj.len()
        };
        reach(&self.out_links) && reach(&self.in_links)
    }

    /// Gives every dangling page artificial out-links.
    ///
    /// A dangling page links back to each page that links to it. A dangling
    /// page nobody links to gets a link to every other page. In-neighbors
    /// are taken from the unpatched graph.
    pub fn patch_dangling(&self) -> WebGraph {
        let n = self.page_count();
        let mut out_links = self.out_links.clone();
        for page in self.dangling_pages() {
            out_links[page] = if self.in_links[page].is_empty() {
                (0..n).filter(|&p| p != page).collect()
            } else {
                self.in_links[page].clone()
            };
        }
        Self::from_out_links(out_links)
    }

    pub fn link_matrix(&self) -> Result<LinkMatrix> {
        LinkMatrix::from_graph(self)
    }

    /// Writes the graph in the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut text = format!("n {}\n", self.page_count());
        for (src, dst) in self.edges() {
            text.push_str(&format!("{src} {dst}\n"));
        }
        text
    }
}

/// Parses the edge-list text format.
///
/// An optional first line `n <N>` declares the page count; otherwise it is
/// inferred as the largest id plus one. `#` starts a comment and blank lines
/// are skipped.
pub fn load_edge_list(text: &str) -> Result<WebGraph> {
    let mut declared: Option<usize> = None;
    let mut seen_content = false;
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected a non-negative page id, found `{s}`"),
            })
        };
        if fields[0] == "n" {
            if seen_content {
                return Err(Error::Parse {
                    line: line_no,
                    message: "`n` declaration must be the first non-comment line".into(),
                });
            }
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected `n <page count>`".into(),
                });
            }
            declared = Some(parse_id(fields[1])?);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `src dst`, found {} fields", fields.len()),
            });
        }
        let (src, dst) = (parse_id(fields[0])?, parse_id(fields[1])?);
        if let Some(n) = declared {
            if src >= n || dst >= n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("page id out of range for declared n = {n}"),
                });
            }
        }
        if src == dst {
            return Err(Error::validation(format!("line {line_no}: self-loop on page {src}")));
        }
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((src, dst));
    }

    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    WebGraph::from_edges(n, edges)
}

/// Random web with `hub_count` highly ranked pages (ids `0..hub_count`).
///
/// Every page links to a uniformly drawn number of distinct non-hub pages in
/// `[min_deg, max_deg]`. Each hub additionally receives links from
/// `ceil(0.9 n)` distinct other pages. The result is deterministic for a
/// fixed seed and already free of dangling pages.
pub fn random_web(
    n: usize,
    seed: u64,
    hub_count: usize,
    min_deg: usize,
    max_deg: usize,
) -> Result<WebGraph> {
    if n < 2 {
        return Err(Error::validation(format!("a web needs at least 2 pages, got {n}")));
    }
    if hub_count >= n {
        return Err(Error::validation(format!(
            "hub count {hub_count} must be smaller than the page count {n}"
        )));
    }
    if min_deg < 1 || min_deg > max_deg {
        return Err(Error::validation(format!(
            "degree bounds must satisfy 1 <= min <= max, got [{min_deg}, {max_deg}]"
        )));
    }
    let non_hubs = n - hub_count;
    if max_deg > non_hubs - 1 {
        return Err(Error::validation(format!(
            "max degree {max_deg} exceeds the {} non-hub targets available",
            non_hubs - 1
        )));
    }
    let hub_sources = (HUB_IN_FRACTION * n as f64).ceil() as usize;
    if hub_count > 0 && hub_sources > n - 1 {
        return Err(Error::validation(format!(
            "{n} pages are too few to give each hub {hub_sources} in-links"
        )));
    }

    let mut rng = stream_rng(seed, 0);
    let mut out_links = vec![Vec::new(); n];
    for (page, outs) in out_links.iter_mut().enumerate() {
        let degree = rng.random_range(min_deg..=max_deg);
        let candidates: Vec<usize> = (hub_count..n).filter(|&p| p != page).collect();
        for idx in sample(&mut rng, candidates.len(), degree) {
            outs.push(candidates[idx]);
        }
    }
    for hub in 0..hub_count {
        let candidates: Vec<usize> = (0..n).filter(|&p| p != hub).collect();
        for idx in sample(&mut rng, candidates.len(), hub_sources) {
            out_links[candidates[idx]].push(hub);
        }
    }
    Ok(WebGraph::from_out_links(out_links).patch_dangling())
}

/// Sparse column-stochastic hyperlink matrix: `a_ij = 1 / n_j` when page `j`
/// links to page `i`.
#[derive(Debug, Clone)]
pub struct LinkMatrix {
    cols: Vec<Vec<usize>>,
    rows: Vec<Vec<usize>>,
    inv_deg: Vec<f64>,
}

impl LinkMatrix {
    pub fn from_graph(g: &WebGraph) -> Result<Self> {
        let dangling = g.dangling_pages();
        if !dangling.is_empty() {
            return Err(Error::validation(format!(
                "pages {dangling:?} have no out-links; patch dangling pages first"
            )));
        }
        let n = g.page_count();
        Ok(LinkMatrix {
            cols: (0..n).map(|j| g.out_links(j).to_vec()).collect(),
            rows: (0..n).map(|i| g.in_links(i).to_vec()).collect(),
            inv_deg: (0..n).map(|j| 1.0 / g.out_degree(j) as f64).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Rows holding a nonzero in column `j` (the out-neighbors of `j`).
    pub fn col_support(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    /// Columns holding a nonzero in row `i` (the in-neighbors of `i`).
    pub fn row_support(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// The common value `1 / n_j` of every nonzero in column `j`.
    pub fn col_value(&self, j: usize) -> f64 {
        self.inv_deg[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.cols[j].binary_search(&i).is_ok() {
            self.inv_deg[j]
        } else {
            0.0
        }
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let v = self.inv_deg[j];
        self.cols[j].iter().map(move |&i| (i, v))
    }

    /// `(A x)_i`, computed from the in-links of `i`.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|&j| self.inv_deg[j] * x[j]).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.row_dot(i, x)).collect()
    }

    pub fn col_sum(&self, j: usize) -> f64 {
        self.cols[j].len() as f64 * self.inv_deg[j]
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            for (i, v) in self.column(j) {
                dense[(i, j)] = v;
            }
        }
        dense
    }
}

/// Action of the Google matrix `M = (1 - m) A + (m / n) S` on `x`, without
/// forming the dense all-ones matrix `S`.
pub fn apply_google(a: &LinkMatrix, m: f64, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    assert_eq!(x.len(), n, "vector length must match the link matrix");
    let teleport = m / n as f64 * x.iter().sum::<f64>();
    (0..n).map(|i| (1.0 - m) * a.row_dot(i, x) + teleport).collect()
}

/// Nonnegative page-value vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::validation(format!("page values must be finite and >= 0, found {bad}")));
        }
        Ok(RankVector(values))
    }

    pub fn uniform(n: usize) -> Self {
        RankVector(vec![1.0 / n as f64; n])
    }

    /// A random probability vector (normalized uniform draws).
    pub fn random_probability<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + f64::MIN_POSITIVE).collect();
        let total: f64 = raw.iter().sum();
        RankVector(raw.into_iter().map(|v| v / total).collect())
    }

    /// Requires a probability vector: nonnegative entries summing to 1 within `1e-9`.
    pub fn probability(values: Vec<f64>) -> Result<Self> {
        let v = Self::new(values)?;
        if !v.is_probability(1e-9) {
            return Err(Error::validation(format!(
                "expected a probability vector, entries sum to {}",
                v.sum()
            )));
        }
        Ok(v)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        self.0.iter().all(|&v| v >= 0.0) && (self.sum() - 1.0).abs() <= tol
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RankVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l2_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The four-page web used as the running example: edges
/// 0→1, 1→2, 1→3, 2→1, 2→3, 3→0, 3→1, 3→2.
pub fn example_web() -> WebGraph {
    WebGraph::from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 0), (3, 1), (3, 2)])
        .expect("example web is valid")
}
