//! Validity and stability of the shipped compression schemes, plus the
//! block family behind the compression bound.
//!
//! cargo run --example compression

use hellylab::compression::trials::{run_scheme_trials, SchemeKind, TrialSettings};
use hellylab::compression::{block_family, generalization_bound};

fn main() -> hellylab::Result<()> {
    let settings = TrialSettings::default();
    for kind in [SchemeKind::Singleton, SchemeKind::Closure, SchemeKind::Svm] {
        let s = run_scheme_trials(kind, 500, 7, &settings)?;
        println!(
            "{kind:?}: valid {}/{} stable {}/{} max |kappa| {} (size {})",
            s.validity_pass,
            s.trials,
            s.stability_pass,
            s.trials,
            s.max_kappa_size,
            s.declared_size
        );
    }
    let f = block_family(12, 2)?;
    println!(
        "block family m=12 l=2: {} members, T_m = {}",
        f.family.len(),
        f.t_m
    );
    for m in [100, 300, 1000] {
        println!(
            "bound for size 3, m = {m}: {:.5}",
            generalization_bound(3, m, 0.05)?
        );
    }
    Ok(())
}
