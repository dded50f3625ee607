//! The oracle cross-check suite behind `pathwise verify`: every fast path
//! is replayed against its brute-force reference on the given network.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use pathwise::graph::{Network, Sense};
use pathwise::oracle::{brute_s, brute_second_shortest, brute_shortest, path_matrix_rank};
use pathwise::policy::ssp;
use pathwise::spanner::{general_basis, Basis as GenericBasis, BasisFile};
use pathwise::Basis;

const TRIALS: usize = 100;
const CAP: usize = 20_000;

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("ok   {name}");
        } else {
            println!("FAIL {name}: {detail}");
            self.failures += 1;
        }
    }
}

pub fn cmd_verify(
    net: &Arc<Network>,
    grid_p: Option<usize>,
    basis_file: Option<&Path>,
    seed: u64,
) -> Result<()> {
    let mut suite = Suite { failures: 0 };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let d = net.d();

    // shortest path against enumeration
    let mut worst: Option<String> = None;
    let mut all_exact = true;
    for _ in 0..TRIALS {
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-500.0..500.0)).collect();
        let (fast_p, fast_v) = net.extremal_path(&w, Sense::Min);
        let (slow_p, slow_v) = brute_shortest(net, &w, CAP)?;
        if fast_v != slow_v || fast_p != slow_p {
            all_exact = false;
            worst = Some(format!("value {fast_v} vs {slow_v}"));
        }
    }
    suite.check(
        &format!("extremal_path == brute_shortest ({TRIALS} random weight vectors)"),
        all_exact,
        worst.clone().unwrap_or_default(),
    );

    // second shortest against enumeration
    let mut all_exact = true;
    let mut detail = String::new();
    for _ in 0..TRIALS {
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-500.0..500.0)).collect();
        let (short, _) = net.extremal_path(&w, Sense::Min);
        let fast = ssp(net, &w, &short);
        let slow = brute_second_shortest(net, &w, CAP);
        match (fast, slow) {
            (Ok((fp, fv)), Ok((sp, sv))) => {
                if fv != sv || fp != sp {
                    all_exact = false;
                    detail = format!("value {fv} vs {sv}");
                }
            }
            (Err(_), Err(_)) => {}
            _ => {
                all_exact = false;
                detail = "one side found no second path".into();
            }
        }
    }
    suite.check(
        &format!("ssp == brute_second_shortest ({TRIALS} random weight vectors)"),
        all_exact,
        detail,
    );

    // basis construction, spanner constant, and reconstruction
    let built: Basis = general_basis(net);
    let basis = match basis_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file: BasisFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let loaded = GenericBasis::<f64>::from_file(&file, net)
                .with_context(|| format!("validating basis from {}", path.display()))?;
            println!("ok   basis file {} validated", path.display());
            loaded
        }
        None => built.clone(),
    };

    let brute = brute_s(&basis, net, CAP)?;
    suite.check(
        "spanner constant equals brute-force coefficient maximum",
        (basis.s() - brute).abs() < 1e-8,
        format!("S={} brute={}", basis.s(), brute),
    );

    let mut max_residual = 0.0f64;
    for path in net.enumerate_paths(CAP)? {
        let c = basis.coefficients(&path);
        max_residual = max_residual.max(c.residual);
    }
    suite.check(
        "every enumerated path reconstructs from the basis",
        max_residual < 1e-8,
        format!("max residual {max_residual}"),
    );

    let rank = path_matrix_rank(net, CAP)?;
    suite.check(
        "basis size equals path-matrix rank",
        rank == basis.d0(),
        format!("rank {rank} vs d0 {}", basis.d0()),
    );
    if let Some(p) = grid_p {
        suite.check(
            "grid rank equals p^2",
            rank == p * p,
            format!("rank {rank} vs {}", p * p),
        );
    }

    if suite.failures > 0 {
        bail!("{} check(s) failed", suite.failures);
    }
    println!("all checks passed");
    Ok(())
}
