"""Bundled demo dataset: a small sales schema with currency conversion.

Used by the CLI quickstart, the test suite, and the example scripts. The
DDL, rows, and annotations here are the single source of truth; tests
compute expected aggregates directly from ROWS.
"""

from __future__ import annotations

import sqlite3
from pathlib import Path

from .physical import PhysicalModel, parse_ddl

DEMO_DDL = """\
CREATE TABLE Product (
    ProductID INT NOT NULL,
    Name VARCHAR,
    ProductNumber VARCHAR,
    PRIMARY KEY (ProductID)
);

CREATE TABLE Currency (
    CurrencyCode VARCHAR NOT NULL,
    Name VARCHAR,
    PRIMARY KEY (CurrencyCode)
);

CREATE TABLE CurrencyRate (
    CurrencyRateID INT NOT NULL,
    AverageRate DECIMAL,
    ToCurrencyCode VARCHAR,
    PRIMARY KEY (CurrencyRateID),
    FOREIGN KEY (ToCurrencyCode) REFERENCES Currency (CurrencyCode)
);

CREATE TABLE SalesOrderHeader (
    SalesOrderID INT NOT NULL,
    OrderDate DATE,
    CurrencyRateID INT,
    PRIMARY KEY (SalesOrderID),
    FOREIGN KEY (CurrencyRateID) REFERENCES CurrencyRate (CurrencyRateID)
);

CREATE TABLE SpecialOffer (
    SpecialOfferID INT NOT NULL,
    Description VARCHAR,
    DiscountPct DECIMAL,
    PRIMARY KEY (SpecialOfferID)
);

CREATE TABLE SalesOrderDetail (
    SalesOrderDetailID INT NOT NULL,
    SalesOrderID INT,
    ProductID INT,
    SpecialOfferID INT,
    OrderQty INT,
    LineTotal DECIMAL,
    PRIMARY KEY (SalesOrderDetailID),
    FOREIGN KEY (SalesOrderID) REFERENCES SalesOrderHeader (SalesOrderID),
    FOREIGN KEY (ProductID) REFERENCES Product (ProductID),
    FOREIGN KEY (SpecialOfferID) REFERENCES SpecialOffer (SpecialOfferID)
);

CREATE TABLE ProductInventory (
    Shelf VARCHAR,
    Bin INT,
    ProductID INT,
    LocationID INT,
    PRIMARY KEY (ProductID, LocationID),
    FOREIGN KEY (ProductID) REFERENCES Product (ProductID)
);

CREATE TABLE specialofferproduct (
    rowguid VARCHAR,
    ModifiedDate VARCHAR,
    SpecialOfferID INT,
    ProductID INT,
    PRIMARY KEY (SpecialOfferID, ProductID),
    FOREIGN KEY (ProductID) REFERENCES Product (ProductID)
);
"""

ROWS: dict[str, list[tuple]] = {
    "Product": [
        (1, "Sport-100 Helmet, Red", "HL-U509-R"),
        (2, "Sport-100 Helmet, Black", "HL-U509"),
        (3, "Mountain Bike Socks, M", "SO-B909-M"),
        (4, "AWC Logo Cap", "CA-1098"),
        (5, "Long-Sleeve Logo Jersey, S", "LJ-0192-S"),
    ],
    "Currency": [
        ("Euro", "Euro"),
        ("USD", "US Dollar"),
        ("GBP", "Pound Sterling"),
    ],
    "CurrencyRate": [
        (1, 0.9123, "Euro"),
        (2, 0.9245, "Euro"),
        (3, 1.0, "USD"),
        (4, 0.7854, "GBP"),
    ],
    "SalesOrderHeader": [
        (101, "2024-03-01", 1),
        (102, "2024-03-02", 2),
        (103, "2024-03-03", 3),
        (104, "2024-03-05", 1),
        (105, "2024-03-08", 4),
    ],
    "SpecialOffer": [
        (1, "No Discount", 0.0),
        (2, "Volume Discount", 0.05),
    ],
    "SalesOrderDetail": [
        (1, 101, 1, 1, 2, 69.98),
        (2, 101, 3, 1, 3, 28.47),
        (3, 102, 2, 1, 1, 34.99),
        (4, 102, 4, 2, 4, 35.96),
        (5, 103, 1, 1, 1, 34.99),
        (6, 104, 2, 1, 2, 69.98),
        (7, 104, 1, 2, 1, 34.99),
        (8, 105, 5, 1, 2, 99.98),
    ],
    "ProductInventory": [
        ("A", 1, 1, 1),
        ("A", 2, 1, 2),
        ("B", 4, 2, 1),
        ("C", 7, 3, 1),
        ("D", 2, 4, 2),
    ],
    "specialofferproduct": [
        ("b207c96d", "2024-02-01", 1, 1),
        ("e552f657", "2024-02-01", 1, 2),
        ("7e24aeef", "2024-02-03", 2, 4),
    ],
}

# class-level descriptions keyed by ontology class id
ANNOTATIONS: dict[str, dict[str, str]] = {
    "product": {
        "description": "bicycle merchandise such as helmet bike frame and accessory models",
    },
    "currency": {
        "description": "world currency codes and names including euro dollar pound",
    },
    "currencyrate": {
        "description": "daily exchange rates with average rate used to convert sales amounts",
    },
    "salesorderdetail": {
        "description": "individual order line items with quantity and line total earnings per product sold",
    },
    "productinventory": {
        "description": "stock quantity on warehouse shelf and bin locations",
    },
}


def demo_model() -> PhysicalModel:
    return parse_ddl(DEMO_DDL)


def build_demo_db(path: Path | str) -> None:
    """Create the demo database file, replacing any previous contents."""
    path = Path(path)
    if path.exists():
        path.unlink()
    connection = sqlite3.connect(path)
    try:
        connection.executescript(DEMO_DDL)
        for table, rows in ROWS.items():
            if not rows:
                continue
            marks = ", ".join("?" for _ in rows[0])
            connection.executemany(
                f"INSERT INTO {table} VALUES ({marks})", rows
            )
        connection.commit()
    finally:
        connection.close()
