use core::fmt;

/// Independent optimization switches of the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VariantFlags {
    /// Multiply only the entries discovered in the previous iteration.
    pub delta: bool,
    /// Keep left operands column-major so that the delta drives both
    /// products.
    pub dual_format: bool,
    /// Store each accumulated matrix as a [`super::MatrixForest`].
    pub lazy_union: bool,
    /// Execute each indexed rule family as a single block product.
    pub indexed_blocks: bool,
    /// Forest growth factor.
    pub b: usize,
}

pub const DEFAULT_B: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlagsError {
    #[error("lazy union requires delta iteration")]
    LazyWithoutDelta,
    #[error("dual format requires delta iteration")]
    DualWithoutDelta,
    #[error("forest growth factor must be greater than 1, got {0}")]
    GrowthFactor(usize),
}

impl VariantFlags {
    pub const fn ma() -> Self {
        VariantFlags { delta: false, dual_format: false, lazy_union: false, indexed_blocks: false, b: DEFAULT_B }
    }

    pub const fn ma1() -> Self {
        VariantFlags { delta: true, ..Self::ma() }
    }

    pub const fn ma14() -> Self {
        VariantFlags { indexed_blocks: true, ..Self::ma1() }
    }

    pub const fn ma1234() -> Self {
        VariantFlags { delta: true, dual_format: true, lazy_union: true, indexed_blocks: true, b: DEFAULT_B }
    }

    pub fn with_b(self, b: usize) -> Self {
        VariantFlags { b, ..self }
    }

    pub fn validate(&self) -> Result<(), FlagsError> {
        if self.lazy_union && !self.delta {
            return Err(FlagsError::LazyWithoutDelta);
        }
        if self.dual_format && !self.delta {
            return Err(FlagsError::DualWithoutDelta);
        }
        if self.b < 2 {
            return Err(FlagsError::GrowthFactor(self.b));
        }
        Ok(())
    }
}

impl Default for VariantFlags {
    fn default() -> Self {
        Self::ma1234()
    }
}

/// Named variants. `Ma12345` runs the `Ma1234` flags on a hand-optimized
/// grammar; choosing that grammar is up to the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Ma,
    Ma1,
    Ma14,
    Ma1234,
    Ma12345,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Ma, Variant::Ma1, Variant::Ma14, Variant::Ma1234, Variant::Ma12345];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Ma => "ma",
            Variant::Ma1 => "ma1",
            Variant::Ma14 => "ma14",
            Variant::Ma1234 => "ma1234",
            Variant::Ma12345 => "ma12345",
        }
    }

    pub fn from_name(name: &str) -> Option<Variant> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn flags(self) -> VariantFlags {
        match self {
            Variant::Ma => VariantFlags::ma(),
            Variant::Ma1 => VariantFlags::ma1(),
            Variant::Ma14 => VariantFlags::ma14(),
            Variant::Ma1234 | Variant::Ma12345 => VariantFlags::ma1234(),
        }
    }

    pub fn needs_optimized_grammar(self) -> bool {
        self == Variant::Ma12345
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
