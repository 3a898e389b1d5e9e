// Captured verbatim from the service running on the bundled dataset, so
// stubbed tests exercise the exact payload shapes the console sees live.

import type {
  AskResponse,
  ChartSpec,
  ErrorBody,
  ExecuteResponse,
  ValidateResponse,
} from "../src/types.js";

export const ASK_ACCEPTED: AskResponse = {
  "status": "Accepted",
  "query": "SELECT Product.ProductNumber, SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\nFROM Product\nJOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\nJOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\nJOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\nWHERE CurrencyRate.ToCurrencyCode = \"Euro\"\nGROUP BY Product.ProductNumber",
  "explanation": "It totals earnings per product for euro orders.",
  "terms": [
    "provide",
    "total",
    "amount",
    "earnings",
    "product",
    "sold",
    "euro",
    "provide total",
    "total amount",
    "amount earnings",
    "earnings product",
    "product sold",
    "sold euro"
  ],
  "schema_sql": "CREATE TABLE Currency (CurrencyCode varchar, Name varchar, PRIMARY KEY (CurrencyCode));\nCREATE TABLE CurrencyRate (CurrencyRateID int, AverageRate decimal, ToCurrencyCode varchar, PRIMARY KEY (CurrencyRateID), FOREIGN KEY (ToCurrencyCode) REFERENCES Currency(CurrencyCode));\nCREATE TABLE Product (ProductID int, Name varchar, ProductNumber varchar, PRIMARY KEY (ProductID));\nCREATE TABLE ProductInventory (Shelf varchar, Bin int, ProductID int, LocationID int, PRIMARY KEY (ProductID, LocationID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID));\nCREATE TABLE SalesOrderDetail (SalesOrderDetailID int, SalesOrderID int, ProductID int, SpecialOfferID int, OrderQty int, LineTotal decimal, PRIMARY KEY (SalesOrderDetailID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID), FOREIGN KEY (SalesOrderID) REFERENCES SalesOrderHeader(SalesOrderID));\nCREATE TABLE SalesOrderHeader (SalesOrderID int, OrderDate date, CurrencyRateID int, PRIMARY KEY (SalesOrderID), FOREIGN KEY (CurrencyRateID) REFERENCES CurrencyRate(CurrencyRateID));\nCREATE TABLE specialofferproduct (rowguid varchar, ModifiedDate varchar, SpecialOfferID int, ProductID int, PRIMARY KEY (SpecialOfferID, ProductID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID));",
  "sub_ontology": {
    "classes": [
      "currency",
      "currencyrate",
      "product",
      "productinventory",
      "salesorderdetail",
      "salesorderheader",
      "specialofferproduct"
    ],
    "seeds": [
      "currency",
      "product",
      "productinventory",
      "salesorderdetail",
      "specialofferproduct"
    ],
    "scores": {
      "currency": 0.20851441405707477,
      "product": 0.6708203932499369,
      "productinventory": 0.5303300858899106,
      "salesorderdetail": 0.21650635094610965,
      "specialofferproduct": 0.5163977794943222
    },
    "paths": [
      [
        "product",
        "productinventory"
      ],
      [
        "product",
        "specialofferproduct"
      ],
      [
        "productinventory",
        "product",
        "specialofferproduct"
      ],
      [
        "product",
        "salesorderdetail"
      ],
      [
        "productinventory",
        "product",
        "salesorderdetail"
      ],
      [
        "salesorderdetail",
        "product",
        "specialofferproduct"
      ],
      [
        "currency",
        "currencyrate",
        "salesorderheader",
        "salesorderdetail",
        "product"
      ]
    ],
    "edges": [
      {
        "source": "currencyrate",
        "target": "currency",
        "property": "has_currency"
      },
      {
        "source": "productinventory",
        "target": "product",
        "property": "has_product"
      },
      {
        "source": "salesorderdetail",
        "target": "product",
        "property": "has_product"
      },
      {
        "source": "salesorderdetail",
        "target": "salesorderheader",
        "property": "has_salesorderheader"
      },
      {
        "source": "salesorderheader",
        "target": "currencyrate",
        "property": "has_currencyrate"
      },
      {
        "source": "specialofferproduct",
        "target": "product",
        "property": "has_product"
      }
    ]
  },
  "attempts": [
    {
      "query": "SELECT Product.ProductNumber, SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\nFROM Product\nJOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\nJOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\nJOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\nWHERE CurrencyRate.ToCurrencyCode = \"Euro\"\nGROUP BY Product.ProductNumber",
      "reports": [
        {
          "status": "Valid",
          "checker_type": "Syntax",
          "message": null
        },
        {
          "status": "Valid",
          "checker_type": "Semantic",
          "message": null
        },
        {
          "status": "Valid",
          "checker_type": "Execution",
          "message": null
        }
      ]
    }
  ],
  "result": {
    "columns": [
      "ProductNumber",
      "TotalEarnings"
    ],
    "column_types": [
      "VARCHAR",
      "FLOAT"
    ],
    "rows": [
      [
        "CA-1098",
        33.245020000000004
      ],
      [
        "HL-U509",
        96.19100900000001
      ],
      [
        "HL-U509-R",
        95.764131
      ],
      [
        "SO-B909-M",
        25.973181
      ]
    ],
    "total_rows": 4,
    "limit": 100,
    "offset": 0
  }
};

export const ASK_EXHAUSTED: AskResponse = {
  "status": "Exhausted",
  "query": null,
  "explanation": null,
  "terms": [
    "provide",
    "total",
    "amount",
    "earnings",
    "product",
    "sold",
    "euro",
    "provide total",
    "total amount",
    "amount earnings",
    "earnings product",
    "product sold",
    "sold euro"
  ],
  "schema_sql": "CREATE TABLE Currency (CurrencyCode varchar, Name varchar, PRIMARY KEY (CurrencyCode));\nCREATE TABLE CurrencyRate (CurrencyRateID int, AverageRate decimal, ToCurrencyCode varchar, PRIMARY KEY (CurrencyRateID), FOREIGN KEY (ToCurrencyCode) REFERENCES Currency(CurrencyCode));\nCREATE TABLE Product (ProductID int, Name varchar, ProductNumber varchar, PRIMARY KEY (ProductID));\nCREATE TABLE ProductInventory (Shelf varchar, Bin int, ProductID int, LocationID int, PRIMARY KEY (ProductID, LocationID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID));\nCREATE TABLE SalesOrderDetail (SalesOrderDetailID int, SalesOrderID int, ProductID int, SpecialOfferID int, OrderQty int, LineTotal decimal, PRIMARY KEY (SalesOrderDetailID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID), FOREIGN KEY (SalesOrderID) REFERENCES SalesOrderHeader(SalesOrderID));\nCREATE TABLE SalesOrderHeader (SalesOrderID int, OrderDate date, CurrencyRateID int, PRIMARY KEY (SalesOrderID), FOREIGN KEY (CurrencyRateID) REFERENCES CurrencyRate(CurrencyRateID));\nCREATE TABLE specialofferproduct (rowguid varchar, ModifiedDate varchar, SpecialOfferID int, ProductID int, PRIMARY KEY (SpecialOfferID, ProductID), FOREIGN KEY (ProductID) REFERENCES Product(ProductID));",
  "sub_ontology": {
    "classes": [
      "currency",
      "currencyrate",
      "product",
      "productinventory",
      "salesorderdetail",
      "salesorderheader",
      "specialofferproduct"
    ],
    "seeds": [
      "currency",
      "product",
      "productinventory",
      "salesorderdetail",
      "specialofferproduct"
    ],
    "scores": {
      "currency": 0.20851441405707477,
      "product": 0.6708203932499369,
      "productinventory": 0.5303300858899106,
      "salesorderdetail": 0.21650635094610965,
      "specialofferproduct": 0.5163977794943222
    },
    "paths": [
      [
        "product",
        "productinventory"
      ],
      [
        "product",
        "specialofferproduct"
      ],
      [
        "productinventory",
        "product",
        "specialofferproduct"
      ],
      [
        "product",
        "salesorderdetail"
      ],
      [
        "productinventory",
        "product",
        "salesorderdetail"
      ],
      [
        "salesorderdetail",
        "product",
        "specialofferproduct"
      ],
      [
        "currency",
        "currencyrate",
        "salesorderheader",
        "salesorderdetail",
        "product"
      ]
    ],
    "edges": [
      {
        "source": "currencyrate",
        "target": "currency",
        "property": "has_currency"
      },
      {
        "source": "productinventory",
        "target": "product",
        "property": "has_product"
      },
      {
        "source": "salesorderdetail",
        "target": "product",
        "property": "has_product"
      },
      {
        "source": "salesorderdetail",
        "target": "salesorderheader",
        "property": "has_salesorderheader"
      },
      {
        "source": "salesorderheader",
        "target": "currencyrate",
        "property": "has_currencyrate"
      },
      {
        "source": "specialofferproduct",
        "target": "product",
        "property": "has_product"
      }
    ]
  },
  "attempts": [
    {
      "query": "SELECT FirstName, LastName, Shift\nFROM BadTableName\nWHERE Department = 'Quality Assurance'",
      "reports": [
        {
          "status": "Valid",
          "checker_type": "Syntax",
          "message": null
        },
        {
          "status": "Invalid",
          "checker_type": "Semantic",
          "message": "Table BadTableName does not exist"
        }
      ]
    },
    {
      "query": "SELECT FirstName, LastName, Shift\nFROM BadTableName\nWHERE Department = 'Quality Assurance'",
      "reports": [
        {
          "status": "Valid",
          "checker_type": "Syntax",
          "message": null
        },
        {
          "status": "Invalid",
          "checker_type": "Semantic",
          "message": "Table BadTableName does not exist"
        }
      ]
    },
    {
      "query": "SELECT FirstName, LastName, Shift\nFROM BadTableName\nWHERE Department = 'Quality Assurance'",
      "reports": [
        {
          "status": "Valid",
          "checker_type": "Syntax",
          "message": null
        },
        {
          "status": "Invalid",
          "checker_type": "Semantic",
          "message": "Table BadTableName does not exist"
        }
      ]
    }
  ],
  "result": null
}

export const EXECUTE_EURO: ExecuteResponse = {
  "query": "SELECT Product.ProductNumber, SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\nFROM Product\nJOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\nJOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\nJOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\nWHERE CurrencyRate.ToCurrencyCode = \"Euro\"\nGROUP BY Product.ProductNumber",
  "result": {
    "columns": [
      "ProductNumber",
      "TotalEarnings"
    ],
    "column_types": [
      "VARCHAR",
      "FLOAT"
    ],
    "rows": [
      [
        "CA-1098",
        33.245020000000004
      ],
      [
        "HL-U509",
        96.19100900000001
      ],
      [
        "HL-U509-R",
        95.764131
      ],
      [
        "SO-B909-M",
        25.973181
      ]
    ],
    "total_rows": 4,
    "limit": 100,
    "offset": 0
  }
};

export const EXECUTE_ZERO_LIMIT: ExecuteResponse = {
  "query": "SELECT Product.ProductNumber, SUM(SalesOrderDetail.LineTotal*CurrencyRate.AverageRate) AS TotalEarnings\nFROM Product\nJOIN SalesOrderDetail ON SalesOrderDetail.ProductID = Product.ProductID\nJOIN SalesOrderHeader ON SalesOrderDetail.SalesOrderID = SalesOrderHeader.SalesOrderID\nJOIN CurrencyRate ON SalesOrderHeader.CurrencyRateID = CurrencyRate.CurrencyRateID\nWHERE CurrencyRate.ToCurrencyCode = \"Euro\"\nGROUP BY Product.ProductNumber",
  "result": {
    "columns": [
      "ProductNumber",
      "TotalEarnings"
    ],
    "column_types": [
      "VARCHAR",
      "VARCHAR"
    ],
    "rows": [],
    "total_rows": 4,
    "limit": 0,
    "offset": 0
  }
};

export const VALIDATE_BAD_TABLE: ValidateResponse = {
  "ok": false,
  "reports": [
    {
      "status": "Valid",
      "checker_type": "Syntax",
      "message": null
    },
    {
      "status": "Invalid",
      "checker_type": "Semantic",
      "message": "Table BadTableName does not exist"
    }
  ],
  "repair": "Generated query may be invalid because:\n- Table BadTableName does not exist.\nOnly generate queries with the provided tables."
};

export const VALIDATE_ORDER_BY: ValidateResponse = {
  "ok": true,
  "reports": [
    {
      "status": "Valid",
      "checker_type": "Syntax",
      "message": null
    },
    {
      "status": "Valid",
      "checker_type": "Semantic",
      "message": null
    },
    {
      "status": "Valid",
      "checker_type": "Execution",
      "message": null
    }
  ],
  "repair": ""
};

export const VALIDATE_SYNTAX: ValidateResponse = {
  "ok": false,
  "reports": [
    {
      "status": "Invalid",
      "checker_type": "Syntax",
      "message": "unexpected token 'end of input', expected an expression at line 1, column 31"
    }
  ],
  "repair": "Generated query may be invalid because:\n- unexpected token 'end of input', expected an expression at line 1, column 31.\nGenerate syntactically valid SQL only."
};

export const CHART_BAR: ChartSpec = {
  "kind": "bar",
  "x": "ProductNumber",
  "y": "TotalEarnings",
  "series": null,
  "title": "Earnings per product"
};

export const GUARD_ERROR: ErrorBody = {
  "code": "guard",
  "message": "statement is not read-only",
  "details": {}
};

export const BUSY_ERROR: ErrorBody = {
  code: "busy",
  message: "conversation has a request in flight",
  details: {},
};

export const NO_SEED_ERROR: ErrorBody = {
  code: "no_seed",
  message: "no term cleared the similarity threshold 0.15",
  details: {},
};
