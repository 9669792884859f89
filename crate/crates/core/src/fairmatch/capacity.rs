use crate::error::{Error, Result};
use crate::scalar::{div_ceil, gcd, Capacity};

/// Source and sink capacities for a graph whose live edge weights sum to
/// `total`.
///
/// Each side's equal share of the total is `ceil(total / count)`; both shares
/// are divided by their gcd. The source edges get the smaller share and the
/// sink edges the item share, so items can receive more than some users can
/// absorb. Returns `None` when `total` is zero (nothing left to route).
pub fn assign_terminal_capacities<C: Capacity>(
    total: C,
    num_items: usize,
    num_users: usize,
) -> Result<Option<(C, C)>> {
    if num_items == 0 || num_users == 0 {
        return Err(Error::InvalidArgument(format!(
            "terminal capacities need items and users, got {num_items} and {num_users}"
        )));
    }
    if total < C::zero() {
        return Err(Error::InvalidArgument(format!("negative total weight {total}")));
    }
    if total.is_zero() {
        return Ok(None);
    }
    let count = |n: usize| {
        C::of_i64(n as i64).ok_or_else(|| Error::InvalidArgument(format!("{n} nodes overflow the capacity type")))
    };
    let eq_items = div_ceil(total, count(num_items)?);
    let eq_users = div_ceil(total, count(num_users)?);
    let g = gcd(eq_items, eq_users);
    Ok(Some((eq_items.min(eq_users) / g, eq_items / g)))
}
