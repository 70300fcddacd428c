"""
Entry point: python app.py <subcommand> [opsi]

Lihat ``python app.py --help`` atau README.md untuk daftar subcommand.
"""

from hjb_growth.cli import main

# ═══════════════════════════════════════════════════════════════════════════════
# MAIN
# ═══════════════════════════════════════════════════════════════════════════════

if __name__ == "__main__":
    main()
