//! Sequential protocol for identical additive valuations.
//!
//! Items are processed in input order; each goes to the agent minimizing
//! `v(X_i + o) / w_i`, ties to the larger weight, remaining ties to the
//! larger index. The result is WEF(0,1) with per-agent subsidy at most `V`
//! and total at most `(n-1) V`.

use num_traits::Zero;

use super::{density_or_zero, finish_report, AllocatorReport, TraceEvent};
use crate::error::Error;
use crate::model::{Allocation, Instance, ValuationProfile};
use crate::rational::{rat_int, Rational};
use crate::Result;

pub fn allocate_identical_additive(instance: &Instance) -> Result<AllocatorReport> {
    let ValuationProfile::IdenticalAdditive { items } = instance.valuations() else {
        return Err(Error::IncompatibleProfile {
            algorithm: "alg2",
            expected: "an identical_additive profile",
        });
    };
    let n = instance.n();
    let w = instance.weights();

    let mut owner = Vec::with_capacity(items.len());
    let mut bundle_value = vec![Rational::zero(); n];
    let mut trace = Vec::new();
    for (o, value) in items.iter().enumerate() {
        let pick = (0..n)
            .min_by(|&a, &b| {
                let ra = (&bundle_value[a] + value) / w.get(a);
                let rb = (&bundle_value[b] + value) / w.get(b);
                // smaller ratio first; on ties prefer larger weight, then larger index
                ra.cmp(&rb)
                    .then_with(|| w.get(b).cmp(w.get(a)))
                    .then(b.cmp(&a))
            })
            .expect("n >= 1");
        bundle_value[pick] += value;
        owner.push(pick);
        trace.push(TraceEvent::Assign { item: o, agent: pick });
    }

    let allocation = Allocation::from_owners(owner, n)?;
    let bound = rat_int(n as i64 - 1) * density_or_zero(instance);
    finish_report(instance, allocation, bound, trace)
}
