use crate::error::Error;

/// Cap on the number of items an exact oracle may enumerate or store.
///
/// The constructions are polynomial but explode quickly in the parameters;
/// a budget turns an accidental astronomic enumeration into a loud error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_items: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_items: 10_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_items: u128) -> Self {
        Budget { max_items }
    }

    /// Errors unless `required` items fit in the budget.
    pub fn check(&self, required: u128) -> Result<(), Error> {
        if required > self.max_items {
            Err(Error::BudgetExceeded {
                required,
                budget: self.max_items,
            })
        } else {
            Ok(())
        }
    }
}

/// Retry cap for rejection samplers. The sampling statements guarantee
/// acceptance with probability close to one for legal parameters, so hitting
/// the cap signals a pathological parameter choice rather than bad luck.
pub const RETRY_CAP: usize = 1000;
