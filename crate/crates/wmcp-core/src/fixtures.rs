//! Bundled example documents used across the toolkit's tests and demos.

/// The login-flow example document (schema v0.2): two inputs and a submit
/// button wired to a shielded `@LOGIN_API` endpoint with CSRF and an
/// encrypted payload hint.
pub const LOGIN_WMCP: &str = include_str!("../fixtures/login.wmcp");

/// A 12-element storefront document exercising every role category,
/// throttle hints, and multiple shielded endpoints.
pub const STOREFRONT_WMCP: &str = include_str!("../fixtures/storefront.wmcp");
