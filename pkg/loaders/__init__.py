"""Binary field files, JSON sidecars and scan artifacts."""
