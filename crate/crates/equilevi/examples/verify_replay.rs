//! Reports carry their own evidence: a reduce report can be replayed by a
//! third party with exact arithmetic only, and tampering is caught.

use equilevi::instance::Instance;
use equilevi::report::{canonical_string, run_reduce, run_verify};
use serde_json::json;

fn main() {
    let inst = Instance::parse(
        r#"{
            "name": "swap",
            "bundle": { "transition": [[{"0":"1"},{}],[{},{"0":"1"}]] },
            "gamma": { "kind": "finite", "generators": [
                { "lift": [[["0"],["1"]],[["1"],["0"]]] }
            ]}
        }"#,
    )
    .unwrap();

    let out = run_reduce(&inst).unwrap();
    println!("partition: {}", out.report["partition"]);

    let v = run_verify(&inst, &out.report).unwrap();
    println!("replay of the honest report:\n{}", canonical_string(&v.report));

    let mut tampered = out.report.clone();
    tampered["idempotents"][0][0][0] = json!(["7"]);
    let v2 = run_verify(&inst, &tampered).unwrap();
    println!(
        "replay of the tampered report: verified = {} (exit {})",
        v2.report["verified"], v2.exit_code
    );
}
