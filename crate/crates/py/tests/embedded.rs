use pyo3::prelude::*;
use pyo3::types::PyDict;

use tyangian_py::tyangian_py;

fn run(code: &std::ffi::CStr) {
    pyo3::append_to_inittab!(tyangian_py);
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("ty", py.import("tyangian_py").unwrap()).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn bindings_from_python() {
    run(c"
u, h = ty.RatFunc('u'), ty.RatFunc('h')
assert (u + h) / (u * u - h * h) == ty.RatFunc('1') / (u - h)
assert len(ty.enumerate_instanton_tableaux(3, 2)) == 9
assert ty.poincare_polynomial('sp', 5, 1) == [1, 0, 4]
assert ty.dynkin_info('D5')['coxeter'] == 8
assert all(c == '-q^6' for _, _, c in ty.longest_reflection_transform_of('D4'))
assert ty.verify_reflection('soInstanton', 2)['holds']
assert ty.PolarizationInstance('-', 4).solve()['verdict'] == 'UNSAT'
assert ty.PolarizationInstance('plus', 4).solve()['verdict'] == 'SAT'
try:
    ty.PolarizationInstance('-', 1)
    raise AssertionError('accepted l = 1')
except ValueError:
    pass
");
}
