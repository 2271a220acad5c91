//! Matrix-identity checks run by `randrank verify`.

use std::fmt;

use serde::Serialize;

use crate::dense::{google_dense, is_column_stochastic, mat_vec, max_abs_diff, Dense};
use crate::dist_simul::{
    ahat_bruteforce, ahat_closed, average_matrix_simul_bruteforce, average_matrix_simul_closed,
    average_modified_simul, build_ap_dense, mhat_simul, UpdatePattern, MAX_BINOMIAL_DIM, MAX_ENUMERATION_DIM,
};
use crate::dist_single::{average_matrix_single, average_modified_single, mhat_single};
use crate::ergodicity::{tau_mhat_bounds, MAX_DENSE_DIM};
use crate::termination::neumann_check;
use crate::webgraph::{l1_dist, LinkMatrix};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// `None` when the check was skipped for size reasons.
    pub passed: Option<bool>,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.into(), passed: Some(passed), detail }
    }

    fn skipped(name: &str, detail: String) -> Self {
        CheckResult { name: name.into(), passed: None, detail }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        write!(f, "{status:<4}  {:<36} {}", self.name, self.detail)
    }
}

const ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 0.9, 1.0];

/// Runs every identity check that fits the graph size.
pub fn verify_all(a: &LinkMatrix, m: f64) -> Result<Vec<CheckResult>> {
    let n = a.dim();
    let mut out = Vec::new();

    out.push(match average_matrix_single(a) {
        Ok(_) => CheckResult::new("single-update average closed form", true, "deviation <= 1e-12".into()),
        Err(e) => CheckResult::new("single-update average closed form", false, e.to_string()),
    });

    let id = Dense::identity(n, n);
    let google = google_dense(a, m);
    let x_star = super::reference_pagerank(a, m)?;
    let modified = |mbar: &Dense, mhat: f64| {
        let rhs = &google * (mhat / m) + &id * (1.0 - mhat / m);
        (max_abs_diff(mbar, &rhs), l1_dist(&mat_vec(mbar, &x_star), &x_star))
    };
    let (gap, fix) = modified(&average_modified_single(a, m)?, mhat_single(m, n));
    out.push(CheckResult::new(
        "single-update modified average",
        gap <= 1e-12 && fix <= 1e-9,
        format!("identity gap {gap:.1e}, fixed-point residual {fix:.1e}"),
    ));
    let mut worst = (0.0f64, 0.0f64);
    for alpha in ALPHAS {
        let (g, r) = modified(&average_modified_simul(a, m, alpha), mhat_simul(m, alpha));
        worst = (worst.0.max(g), worst.1.max(r));
    }
    out.push(CheckResult::new(
        "simultaneous modified average",
        worst.0 <= 1e-12 && worst.1 <= 1e-9,
        format!("identity gap {:.1e}, fixed-point residual {:.1e}", worst.0, worst.1),
    ));

    if n <= MAX_ENUMERATION_DIM {
        let mut gap = 0.0f64;
        for alpha in ALPHAS {
            let brute = average_matrix_simul_bruteforce(a, alpha)?;
            gap = gap.max(max_abs_diff(&brute, &average_matrix_simul_closed(a, alpha)));
        }
        out.push(CheckResult::new("pattern enumeration average", gap <= 1e-10, format!("max gap {gap:.1e}")));

        let mut gap = 0.0f64;
        for l in 0..=n {
            gap = gap.max(max_abs_diff(&ahat_closed(a, l)?, &ahat_bruteforce(a, l)?));
        }
        out.push(CheckResult::new("flag-count pattern sums", gap <= 1e-10, format!("max gap {gap:.1e}")));

        let stochastic = (0..1u64 << n).all(|mask| is_column_stochastic(&build_ap_dense(a, &UpdatePattern::from_mask(n, mask)), 1e-12));
        out.push(CheckResult::new("pattern matrices column-stochastic", stochastic, format!("{} patterns", 1u64 << n)));
    } else {
        let why = format!("n = {n} exceeds {MAX_ENUMERATION_DIM}");
        out.push(CheckResult::skipped("pattern enumeration average", why.clone()));
        out.push(CheckResult::skipped("flag-count pattern sums", why.clone()));
        out.push(CheckResult::skipped("pattern matrices column-stochastic", why));
    }
    if n > MAX_ENUMERATION_DIM && n <= MAX_BINOMIAL_DIM {
        let ok = (0..=n).all(|l| ahat_closed(a, l).is_ok());
        out.push(CheckResult::new("flag-count closed forms build", ok, "no overflow".into()));
    }

    if n <= MAX_DENSE_DIM {
        let mut holds = true;
        let mut worst = 0.0f64;
        for c in 0..n {
            let mut frozen = vec![None; n];
            frozen[c] = Some(x_star[c]);
            let r = neumann_check(a, m, 0.5, &frozen, 60);
            holds &= r.holds();
            worst = worst.max(r.norm1 - r.limit);
        }
        out.push(CheckResult::new(
            "frozen-block norm and Neumann sums",
            holds,
            format!("max ||Â_NN||_1 - (1 - m̂) = {worst:.1e} over singleton frozen sets"),
        ));

        out.push(match tau_mhat_bounds(a, m) {
            Ok(r) => {
                let worst = r.per_page.iter().copied().fold(r.average, f64::max);
                CheckResult::new("ergodicity coefficient bounds", true, format!("max τ {worst:.6} <= {:.6}", r.limit))
            }
            Err(e) => CheckResult::new("ergodicity coefficient bounds", false, e.to_string()),
        });
    } else {
        let why = format!("n = {n} exceeds {MAX_DENSE_DIM}");
        out.push(CheckResult::skipped("frozen-block norm and Neumann sums", why.clone()));
        out.push(CheckResult::skipped("ergodicity coefficient bounds", why));
    }
    Ok(out)
}
