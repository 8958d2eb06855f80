use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let module = PyModule::new(py, "mpda").unwrap();
        mpda::mpda(&module).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("mpda", module).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn module_round_trip() {
    with_module(
        cr#"
g = mpda.Graph(3, [(0, 1), (1, 2)])
assert g.n == 3 and g.edge_count() == 2
run = mpda.anonymize(g, 3)
assert run.total_slack == 1 and run.theta == [0, -1, 0]
try:
    mpda.anonymize(g, 3, mode="strict")
    raise AssertionError("expected infeasible")
except mpda.InfeasibleError as e:
    assert "parity" in str(e)
fixed = mpda.anonymize(g, 3, mode="strict", parity_repair=True)
assert fixed.graph.degrees() == [2, 2, 2]
ev = mpda.evaluate(g, g)
assert ev["precision_index"] == 1.0
assert all(v == 0.0 for v in ev["errors"].values())
assert mpda.precision([0, 0, 1, 1], [0, 1, 2, 3]) == 4 / 6
targets = mpda.anonymize_degrees([3, 1, 1, 1], 2)
assert len(targets) == 4 and all(targets.count(x) >= 2 for x in targets)
"#,
    );
}
