//! Exact computation of uniform bounds on the index of the subgroup of
//! inertia acting unipotently on ℓ-adic cohomology.
//!
//! * [`numtheory`]: primes, [`FactoredInt`](numtheory::FactoredInt), totients.
//! * [`group_orders`]: `C_{ℓ,d}`, the orders of `GL_d(F_ℓ)` and `GL_d(Z/4Z)`.
//! * [`compat_bounds`]: `C_d = gcd_{ℓ≠p} C_{ℓ,d}` by certified scan, and the
//!   refined tame/wild bounds.
//! * [`variety_bounds`]: middle Betti numbers of hyperplane sections and the
//!   product bound `C_{b,c,h}`.
//! * [`chern_invariants`]: `(b, c)` for projective spaces, hypersurfaces and
//!   complete intersections via Chern classes.
//! * [`wd_matrix`]: unipotence, Jordan-Chevalley, trace criterion and
//!   Weil-Deligne pairs for exact rational matrices.
//! * [`cli`]: the `monobound` command line front end.

pub mod chern_invariants;
pub mod cli;
pub mod compat_bounds;
pub mod group_orders;
pub mod numtheory;
pub mod variety_bounds;
pub mod wd_matrix;
