use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where a map or family is defined.
    Domain(String),
    /// A parameter violates a family or operation invariant.
    Parameter(String),
    /// A tabulated map was used before (or beyond) its tabulation.
    Initialization(String),
    /// Quadrature could not converge; the integrand is likely not integrable.
    Integrability(String),
    /// Discretization produced an invalid system.
    Assembly(String),
    /// An operation-specific precondition does not hold.
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::Initialization(m) => write!(f, "initialization error: {m}"),
            Error::Integrability(m) => write!(f, "integrability error: {m}"),
            Error::Assembly(m) => write!(f, "assembly error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
