use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use angrad_core::problems::{gen_laplace, LaplaceSpec, LaplaceVariant};
use angrad_core::QuadraticModel;

struct Counting;

static ALLOCS: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        ALLOCS.fetch_add(1, Ordering::SeqCst);
        System.alloc(layout)
    }
    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

#[test]
fn operator_apply_does_not_allocate() {
    let (op, x0, u) = gen_laplace(&LaplaceSpec::variant(20, LaplaceVariant::B)).unwrap();
    let mut out = vec![0.0; x0.len()];
    let before = ALLOCS.load(Ordering::SeqCst);
    for _ in 0..10 {
        op.apply(&u, &mut out);
    }
    assert_eq!(ALLOCS.load(Ordering::SeqCst), before);
    assert_eq!(out, op.rhs());
}
