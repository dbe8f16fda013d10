use std::fmt::Write;

use clap::Args;
use ctxkit_core::quantum::{run_identity_suite, SuiteConfig};
use serde_json::json;

use crate::{GlobalArgs, Report, Status};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of random rotations.
    #[arg(long, default_value_t = 1000)]
    pub rotations: usize,
    /// Number of random orthogonal triples.
    #[arg(long, default_value_t = 100)]
    pub triples: usize,
}

pub fn run(args: &VerifyArgs, g: &GlobalArgs) -> anyhow::Result<Report> {
    let cfg = SuiteConfig {
        seed: g.seed,
        rotations: args.rotations,
        triples: args.triples,
    };
    let report = run_identity_suite(&cfg);
    let pass = report.passes(g.tolerance);

    let mut text = String::new();
    writeln!(text, "seed {}, {} rotations, {} triples, tolerance {:e}", g.seed, cfg.rotations, cfg.triples, g.tolerance)?;
    let mut checks = Vec::new();
    for c in &report.checks {
        let ok = c.residual <= g.tolerance;
        writeln!(
            text,
            "{:<4} {:<64} n={:<5} residual {:.3e}",
            if ok { "ok" } else { "FAIL" },
            c.name,
            c.instances,
            c.residual
        )?;
        checks.push(json!({
            "name": c.name,
            "instances": c.instances,
            "residual": c.residual,
            "ok": ok,
        }));
    }
    writeln!(text, "max residual {:.3e}: {}", report.max_residual(), if pass { "pass" } else { "FAIL" })?;

    Ok(Report {
        text,
        json: json!({
            "seed": g.seed,
            "rotations": cfg.rotations,
            "triples": cfg.triples,
            "tolerance": g.tolerance,
            "checks": checks,
            "max_residual": report.max_residual(),
            "pass": pass,
        }),
        status: if pass { Status::Pass } else { Status::Fail },
    })
}
