//! Seeded restoration scenario generation.
