/// Number of bits needed to store every value in `0..=max`.
pub(crate) fn bits_for(max: u64) -> u32 {
    (u64::BITS - max.leading_zeros()).max(1)
}

/// `ceil(log2 n)`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub(crate) fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        u64::BITS - (n - 1).leading_zeros()
    }
}

/// `floor(log2 n)` for `n >= 1`.
pub(crate) fn floor_log2(n: u64) -> u32 {
    debug_assert!(n >= 1);
    u64::BITS - 1 - n.leading_zeros()
}

/// Fixed-width bit field inside a `u128` record.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Field {
    shift: u32,
    mask: u128,
}

impl Field {
    pub(crate) const fn new(shift: u32, width: u32) -> Self {
        Field {
            shift,
            mask: if width >= 128 {
                u128::MAX
            } else {
                (1u128 << width) - 1
            },
        }
    }

    #[inline(always)]
    pub(crate) fn get(self, rec: u128) -> u64 {
        ((rec >> self.shift) & self.mask) as u64
    }

    #[inline(always)]
    pub(crate) fn set(self, rec: u128, value: u64) -> u128 {
        debug_assert!((value as u128) <= self.mask);
        (rec & !(self.mask << self.shift)) | ((value as u128) << self.shift)
    }

    #[inline(always)]
    pub(crate) fn put(self, value: u64) -> u128 {
        debug_assert!((value as u128) <= self.mask);
        (value as u128) << self.shift
    }

    /// Everything from this field upwards, for use as a sort key.
    #[inline(always)]
    pub(crate) fn and_above(self, rec: u128) -> u128 {
        rec >> self.shift
    }
}
