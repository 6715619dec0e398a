//! Coupon-collector draws against the lemma's bound.
//!
//! cargo run --example coupon

use hellylab::simulation::coupon_collector;

fn main() -> hellylab::Result<()> {
    for (k, m) in [(100, 10), (100, 5), (1000, 10)] {
        let r = coupon_collector(k, m, 4000, 0)?;
        println!(
            "k={k:<5} m={m:<3} bound {:>9.3} median {:>8.1} P(Z <= bound) {:.3}",
            r.lemma_bound, r.median, r.at_or_below_bound
        );
    }
    Ok(())
}
