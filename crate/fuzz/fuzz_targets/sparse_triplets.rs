//! Operators decoded from bytes: two dimension bytes, then 4-byte
//! `(row, col, re, im)` triplets with small integer parts.

#![no_main]

use bshq_core::opcore::SparseOperator;
use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let (rows, cols) = (usize::from(data[0] % 17), usize::from(data[1] % 17));
    let triplets = data[2..].chunks_exact(4).map(|t| {
        let value = Complex64::new(f64::from(t[2] as i8), f64::from(t[3] as i8));
        (usize::from(t[0]), usize::from(t[1]), value)
    });
    let Ok(op) = SparseOperator::from_triplets(rows, cols, triplets) else {
        return;
    };
    assert!(op.iter().all(|(r, c, v)| r < rows && c < cols && v != Complex64::new(0.0, 0.0)));
    assert_eq!(op.adjoint().adjoint(), op);
    let left = SparseOperator::identity(rows).compose(&op).unwrap();
    let right = op.compose(&SparseOperator::identity(cols)).unwrap();
    assert_eq!(left, op);
    assert_eq!(right, op);
});
