use pyo3::prelude::*;

use gapstring_py::gapstring_py;

fn run(code: &std::ffi::CStr) {
    pyo3::append_to_inittab!(gapstring_py);
    Python::attach(|py| {
        if let Err(e) = py.run(code, None, None) {
            e.display(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn bindings_answer_queries() {
    run(c"
import gapstring_py as gs
ssi = gs.SsiIndex([[1, 3, 4], [3, 6, 8]], 10, backend='full')
assert ssi.report(0, 1, 2) == [(1, 3), (4, 6)]
g = gs.GappedStringIndex(b'banana')
assert g.report(b'an', b'na', 1, 3) == [(2, 3), (2, 5), (4, 5)]
assert gs.JumbledIndex(b'acaacabd').report([4, 1, 2, 1]) == [(1, 8)]
idx = gs.Index.build('smallest-shift', b'10 2\\n5 10\\n7\\n')
assert idx.query('1 2') == 2
assert gs.Index.from_bytes(idx.to_bytes()).query('2 1') == 3
try:
    idx.query('1 9')
    raise AssertionError('bad set index accepted')
except ValueError:
    pass
");
}
