//! Name-keyed registries of interchangeable strategies.
//!
//! Verification certificates and convergence ladders are trait objects
//! registered under a name; the command line selects them at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A strategy that can be looked up by name.
pub trait Named {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Adds `item` under its own name, replacing any previous entry with that name.
    pub fn register(&mut self, item: Box<T>) -> &mut Self {
        self.entries.insert(item.name(), item);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries.get(name).map(|b| b.as_ref()).ok_or_else(|| Error::UnknownStrategy {
            kind: self.kind,
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    /// Registered names in sorted order.
    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|b| b.as_ref())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
        fn summary(&self) -> &'static str {
            "says hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    #[test]
    fn lookup_and_unknown() {
        let mut r: Registry<dyn Greeter> = Registry::new("greeter");
        r.register(Box::new(Hello));
        assert_eq!(r.get("hello").unwrap().greet(), "hello");
        assert_eq!(r.names(), vec!["hello"]);
        match r.get("bye") {
            Err(Error::UnknownStrategy { kind, name, available }) => {
                assert_eq!((kind, name.as_str(), available.as_str()), ("greeter", "bye", "hello"));
            }
            _ => panic!("expected unknown strategy"),
        }
    }
}
