import { ApiClient } from "./api";
import { mountApp } from "./app";

mountApp(document.getElementById("app") ?? document.body, new ApiClient());
