//! Small hand-written systems used by tests, the CLI and the documentation.

use crate::degree::Degree;
use crate::model::{Nfts, NftsBuilder};

fn d(s: &str) -> Degree {
    s.parse().expect("literal degree")
}

/// Five states `s1..s5`, actions `a`, `b` and three distributions
///
/// ```text
/// µ1 = {s2:0.5, s3:0.8}   µ2 = {s3:0.6, s5:0.4}   µ3 = {s4:0.7, s5:0.9}
/// s1 -a-> µ1   s1 -a-> µ2   s2 -a-> µ3   s3 -b-> µ1   s4 -b-> µ1   s5 -a-> µ3
/// ```
pub fn example_nfts() -> Nfts {
    let mut b = NftsBuilder::new();
    for name in ["s1", "s2", "s3", "s4", "s5"] {
        b.add_state(name).expect("fresh state");
    }
    let a = b.add_action("a").expect("fresh action");
    let bb = b.add_action("b").expect("fresh action");
    let mu1 = b.intern_named(&[("s2", d("0.5")), ("s3", d("0.8"))]).expect("known states");
    let mu2 = b.intern_named(&[("s3", d("0.6")), ("s5", d("0.4"))]).expect("known states");
    let mu3 = b.intern_named(&[("s4", d("0.7")), ("s5", d("0.9"))]).expect("known states");
    let s = |name: &str| b.state(name).expect("known state");
    let edges = [
        (s("s1"), a, mu1),
        (s("s1"), a, mu2),
        (s("s2"), a, mu3),
        (s("s3"), bb, mu1),
        (s("s4"), bb, mu1),
        (s("s5"), a, mu3),
    ];
    for (src, act, mu) in edges {
        b.add_transition(src, act, mu).expect("valid transition");
    }
    b.build().expect("well-formed example")
}
